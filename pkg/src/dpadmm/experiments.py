"""Experiment harness: loss curves, privacy-accuracy tradeoff fits and alpha selection.

Configuration files are plain ``key = value`` lines (``#`` starts a
comment). Recognized keys and defaults are the fields of
:class:`ExperimentConfig`; list values are comma separated and seed lists
also accept ranges such as ``0-19``.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize, stats

from . import model
from .admm import AdmmConfig, run_nonprivate
from .data import Dataset, load_dataset, normalize, partition, synthetic_dataset
from .dvp import run_dvp
from .network import parse_topology
from .pvp import run_pvp
from .schedule import AlphaSchedule

MECHANISMS = ("none", "dvp", "pvp")
GRID_STEP = 1e-4


# configuration -------------------------------------------------------------

def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            seeds.extend(range(int(a), int(b) + 1))
        else:
            seeds.append(int(part))
    return seeds


def _parse_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


@dataclass
class ExperimentConfig:
    """One experiment.

    Attributes:
        dataset: ``synthetic:n=200:dim=5:seed=1[:separable=0][:flip=0.1]``
            or a file path read with ``format``.
        topology: Topology spec such as ``ring:4`` or ``er:10:0.3:seed=7``.
        mechanisms: Any of ``none``, ``dvp``, ``pvp``.
        alphas: Privacy parameters, one curve each.
        alpha_schedule: Optional file with one alpha per line; replaces
            ``alphas`` with a single per-round schedule.
        iterations: Rounds per run.
        seeds: Noise and initialization seeds averaged over.
    """

    dataset: str = "synthetic:n=200:dim=5:seed=1"
    format: str = "csv"
    topology: str = "ring:4"
    mechanisms: list = field(default_factory=lambda: ["none", "dvp", "pvp"])
    alphas: list = field(default_factory=lambda: [0.01, 0.1, 0.5, 1.0])
    alpha_schedule: str | None = None
    rho: float = 0.1
    c_r: float = 10.0
    eta: float = 1.0
    iterations: int = 100
    seeds: list = field(default_factory=lambda: list(range(20)))
    output_dir: str = "results"
    zeta_rule: str = "proof_half"
    t_stop: int | None = None
    partition: str = "even"
    partition_seed: int = 0
    loss: str = "logistic"
    regularizer: str = "l2"
    workers: int = 1

    def __post_init__(self):
        self.alphas = [float(a) for a in self.alphas]
        self.seeds = [int(s) for s in self.seeds]
        if any(not a > 0 for a in self.alphas):
            raise ValueError("alpha grid values must be positive")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        for m in self.mechanisms:
            if m not in MECHANISMS:
                raise ValueError(f"unknown mechanism {m!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        parser.read_string("[experiment]\n" + text)
        raw = dict(parser["experiment"])
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for key, val in raw.items():
            if key == "mechanisms":
                kw[key] = _parse_list(val)
            elif key == "alphas":
                kw[key] = [float(v) for v in _parse_list(val)]
            elif key == "seeds":
                kw[key] = _parse_seeds(val)
            elif key in ("rho", "c_r", "eta"):
                kw[key] = float(val)
            elif key in ("iterations", "partition_seed", "workers"):
                kw[key] = int(val)
            elif key == "t_stop":
                kw[key] = int(val) if val.strip() else None
            else:
                kw[key] = val.strip() or None
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text())

    def admm_config(self) -> AdmmConfig:
        return AdmmConfig(model.ErmParams(self.c_r, self.rho), eta=self.eta, max_iters=self.iterations)

    def schedules(self) -> list[tuple[str, object]]:
        """``(label, schedule)`` pairs, one per private curve."""
        if self.alpha_schedule:
            return [("schedule", AlphaSchedule.from_file(self.alpha_schedule))]
        return [(f"{a:g}", a) for a in self.alphas]


def load_experiment_dataset(spec: str, format: str = "csv") -> Dataset:
    if spec.startswith("synthetic"):
        opts = dict(n=200, dim=5, seed=0, separable=1, flip=0.1)
        for part in spec.split(":")[1:]:
            key, val = part.split("=", 1)
            if key not in opts:
                raise ValueError(f"unknown synthetic option {key!r}")
            opts[key] = float(val) if key == "flip" else int(val)
        return synthetic_dataset(opts["n"], opts["dim"], seed=opts["seed"],
                                 separable=bool(opts["separable"]), flip_prob=opts["flip"])
    return normalize(load_dataset(spec, format))


def build_problem(config: ExperimentConfig):
    """``(partitioned, graph, loss, reg)`` for a config."""
    graph = parse_topology(config.topology)
    data = load_experiment_dataset(config.dataset, config.format)
    parts = partition(data, graph, strategy=config.partition, seed=config.partition_seed)
    return parts, graph, model.get_loss(config.loss), model.get_regularizer(config.regularizer)


def run_mechanism(mechanism, partitioned, graph, loss, reg, admm_config, alpha=None, seed=0,
                  zeta_rule="proof_half", t_stop=None):
    if mechanism == "none":
        return run_nonprivate(partitioned, graph, loss, reg, admm_config, seed=seed)
    if mechanism == "dvp":
        return run_dvp(partitioned, graph, loss, reg, admm_config, alpha, seed=seed,
                       zeta_rule=zeta_rule)
    if mechanism == "pvp":
        return run_pvp(partitioned, graph, loss, reg, admm_config, alpha, t_stop=t_stop, seed=seed,
                       zeta_rule=zeta_rule)
    raise ValueError(f"unknown mechanism {mechanism!r}")


# metrics --------------------------------------------------------------------

def empirical_loss(trace, t: int, partitioned=None, loss=None, c_r=None) -> np.ndarray:
    """Per-node ``(C_R / B_p) sum L(y f_p(t) @ x)``.

    Read from the trace record for ``t >= 1``; recomputed from the data when
    ``partitioned``, ``loss`` and ``c_r`` are given (required for ``t = 0``).
    """
    if not 0 <= t <= len(trace):
        raise IndexError(f"t = {t} outside [0, {len(trace)}]")
    if partitioned is not None:
        f = trace.state_at(t)
        return np.array([model.empirical_loss(f[k], ds, loss, c_r) for k, ds in enumerate(partitioned)])
    if t == 0:
        raise ValueError("the initial loss needs the data")
    return trace.records[t - 1].empirical_loss.copy()


def misclassification_rate(classifier, test_set) -> float:
    """Fraction of points with ``sign(f @ x) != y``; a zero score predicts +1."""
    X, y = np.asarray(test_set.X, dtype=float), np.asarray(test_set.y)
    if len(y) == 0:
        raise ValueError("empty test set")
    pred = np.where(X @ np.asarray(classifier, dtype=float) >= 0, 1, -1)
    return float(np.mean(pred != y))


def mean_loss_curve(trace) -> np.ndarray:
    """Node-averaged empirical loss for rounds 1..T."""
    return trace.empirical_losses.mean(axis=1)


# suites ---------------------------------------------------------------------

def _one_run(args):
    mechanism, label, schedule, seed, config = args
    parts, graph, loss, reg = build_problem(config)
    trace = run_mechanism(mechanism, parts, graph, loss, reg, config.admm_config(), schedule, seed,
                          config.zeta_rule, config.t_stop)
    return mechanism, label, seed, mean_loss_curve(trace)


def loss_curves(config: ExperimentConfig) -> dict[tuple[str, str], np.ndarray]:
    """Loss curves keyed by ``(mechanism, alpha label)``, shape (seeds, T)."""
    jobs = []
    for mech in config.mechanisms:
        labels = [("-", None)] if mech == "none" else config.schedules()
        for label, schedule in labels:
            for seed in config.seeds:
                jobs.append((mech, label, schedule, seed, config))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_one_run, jobs))
        else:
            results = [_one_run(j) for j in jobs]
    curves: dict = {}
    for mech, label, seed, curve in results:
        curves.setdefault((mech, label), []).append(curve)
    return {k: np.array(v) for k, v in curves.items()}


def _column_name(key):
    mech, label = key
    return mech if mech == "none" else f"{mech}_alpha={label}"


def curves_to_csv(curves: dict) -> str:
    """Header ``iteration,<mechanism>_alpha=<a>,...``; one row per round, seed-averaged."""
    keys = list(curves)
    T = next(iter(curves.values())).shape[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration"] + [_column_name(k) for k in keys])
    means = [curves[k].mean(axis=0) for k in keys]
    for t in range(T):
        w.writerow([t + 1] + [repr(float(m[t])) for m in means])
    return buf.getvalue()


def csv_to_curves(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header) if k > 0}


def _svg_figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "dpadmm"
    return plt


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_curves(curves: dict, path, title: str = "") -> None:
    plt = _svg_figure()
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, arr in curves.items():
        mean = arr.mean(axis=0)
        ax.plot(np.arange(1, len(mean) + 1), mean, label=_column_name(key))
    ax.set_xlabel("iteration")
    ax.set_ylabel("empirical loss")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(fontsize=7)
    _save_svg(fig, path)
    plt.close(fig)


@dataclass
class ConvergenceResult:
    curves: dict
    csv_path: Path
    svg_path: Path

    def final_means(self) -> dict:
        return {k: float(v[:, -1].mean()) for k, v in self.curves.items()}


def run_convergence_suite(config: ExperimentConfig) -> ConvergenceResult:
    """Seed-averaged loss-vs-iteration curves as ``convergence.csv`` and ``convergence.svg``."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    curves = loss_curves(config)
    csv_path, svg_path = out / "convergence.csv", out / "convergence.svg"
    csv_path.write_text(curves_to_csv(curves))
    plot_curves(curves, svg_path, "loss vs iteration")
    return ConvergenceResult(curves, csv_path, svg_path)


def select_rho(config: ExperimentConfig, rho_grid, mechanism: str = "dvp", alpha: float = 0.3):
    """Pick the regularization weight with the smallest seed-averaged final loss at ``alpha``.

    Returns:
        ``(best_rho, {rho: mean final loss})``; ties go to the first grid value.
    """
    if not rho_grid:
        raise ValueError("empty rho grid")
    scores = {}
    for rho in rho_grid:
        cfg = ExperimentConfig(**{**asdict(config), "rho": float(rho), "mechanisms": [mechanism],
                                  "alphas": [alpha], "alpha_schedule": None})
        curves = loss_curves(cfg)
        scores[float(rho)] = float(next(iter(curves.values()))[:, -1].mean())
    best = min(scores, key=scores.get)
    return best, scores


@dataclass
class FinalOutputResult:
    rows: list
    csv_path: Path
    svg_path: Path


def _final_output_run(args):
    mechanism, label, schedule, seed, config = args
    parts, graph, loss, reg = build_problem(config)
    trace = run_mechanism(mechanism, parts, graph, loss, reg, config.admm_config(), schedule, seed,
                          config.zeta_rule, config.t_stop)
    final = trace.final()
    mer = np.mean([misclassification_rate(final[k], ds) for k, ds in enumerate(parts)])
    return mechanism, label, float(trace.records[-1].empirical_loss.mean()), float(mer)


def run_final_output_suite(config: ExperimentConfig) -> FinalOutputResult:
    """Final-round loss and misclassification rate per mechanism and alpha.

    The rate is each node's final classifier scored on its own data and
    averaged over nodes and seeds. Writes ``final_output.csv``
    (``mechanism,alpha,mean_loss,mean_mer``) and ``final_output.svg``.
    """
    jobs = []
    for mech in config.mechanisms:
        labels = [("-", None)] if mech == "none" else config.schedules()
        for label, schedule in labels:
            jobs.extend((mech, label, schedule, seed, config) for seed in config.seeds)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_final_output_run, jobs))
        else:
            results = [_final_output_run(j) for j in jobs]
    grouped: dict = {}
    for mech, label, loss_, mer in results:
        grouped.setdefault((mech, label), []).append((loss_, mer))
    rows = [(mech, label, float(np.mean([v[0] for v in vals])), float(np.mean([v[1] for v in vals])))
            for (mech, label), vals in grouped.items()]

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mechanism", "alpha", "mean_loss", "mean_mer"])
    for mech, label, loss_, mer in rows:
        w.writerow([mech, label, repr(loss_), repr(mer)])
    csv_path = out / "final_output.csv"
    csv_path.write_text(buf.getvalue())

    plt = _svg_figure()
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for mech in dict.fromkeys(r[0] for r in rows):
        pts = [r for r in rows if r[0] == mech]
        if mech == "none":
            for ax, k in zip(axes, (2, 3)):
                ax.axhline(pts[0][k], color="k", ls="--", label="none")
            continue
        xs = [float(r[1]) if r[1] != "schedule" else np.nan for r in pts]
        for ax, k in zip(axes, (2, 3)):
            ax.plot(xs, [r[k] for r in pts], "o-", label=mech)
    for ax, name in zip(axes, ("empirical loss", "misclassification rate")):
        ax.set_xlabel("alpha")
        ax.set_ylabel(name)
        ax.set_xscale("log")
        ax.legend(fontsize=7)
    svg_path = out / "final_output.svg"
    _save_svg(fig, svg_path)
    plt.close(fig)
    return FinalOutputResult(rows, csv_path, svg_path)


# tradeoff model -------------------------------------------------------------

DEFAULT_OMEGA = (0.02, 6.0, 9.0, 1.0)


@dataclass
class TradeoffModel:
    """``L_acc = c4 exp(-c5 alpha) + c6`` and ``U_priv = w1 ln(w2 / (w3 alpha + w4 alpha^2))``."""

    c4: float
    c5: float
    c6: float = 0.0
    omega: tuple = DEFAULT_OMEGA

    def accuracy_loss(self, alpha):
        return self.c4 * np.exp(-self.c5 * np.asarray(alpha, dtype=float)) + self.c6

    def validate(self, alpha_range) -> None:
        lo, hi = alpha_range
        if not (self.c4 > 0 and self.c5 > 0):
            raise ValueError("c4 and c5 must be positive")
        grid = np.linspace(lo, hi, 1001)
        w1, w2, w3, w4 = self.omega
        if np.any(w3 * grid + w4 * grid ** 2 <= 0):
            raise ValueError("utility log argument is not positive on the range")
        u = utility_privacy(self, grid)
        if np.any(np.diff(u) > 0) and w1 > 0:
            raise ValueError("utility of privacy is not decreasing on the range")


def utility_privacy(model_: TradeoffModel, alpha):
    w1, w2, w3, w4 = model_.omega
    a = np.asarray(alpha, dtype=float)
    denom = w3 * a + w4 * a ** 2
    if np.any(denom <= 0):
        raise ValueError("w3 * alpha + w4 * alpha^2 must be positive")
    out = w1 * np.log(w2 / denom)
    return float(out) if np.ndim(out) == 0 else out


def _golden_max(fn, lo, hi, tol=1e-9):
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _is_unimodal(values) -> bool:
    """True when the values rise (weakly) and then fall (weakly)."""
    steps = np.sign(np.diff(values))
    steps = steps[steps != 0]
    falling = np.flatnonzero(steps < 0)
    return len(falling) == 0 or bool(np.all(steps[falling[0]:] < 0))


def choose_alpha(model_: TradeoffModel, alpha_range) -> float:
    """Maximize ``U_priv - L_acc`` on ``alpha_range``; ties go to the smaller alpha."""
    lo, hi = (float(v) for v in alpha_range)
    if not hi >= lo or not lo > 0:
        raise ValueError("alpha range must be a nonempty interval of positive values")
    if hi == lo:
        return lo

    def objective(a):
        return utility_privacy(model_, a) - model_.accuracy_loss(a)

    n = max(2, int(math.ceil((hi - lo) / GRID_STEP)) + 1)
    grid = np.linspace(lo, hi, n)
    vals = objective(grid)
    k = int(np.argmax(vals))  # first maximum, so the smallest alpha on ties
    if not _is_unimodal(vals) or np.ptp(vals) <= 1e-12 * max(1.0, np.max(np.abs(vals))):
        return float(grid[k])
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    best = _golden_max(lambda x: float(objective(x)), a, b)
    return best if objective(best) >= vals[k] else float(grid[k])


@dataclass
class TradeoffFit:
    model: TradeoffModel | None
    rmse: float
    converged: bool
    degenerate: bool
    alphas: np.ndarray
    losses: np.ndarray


def fit_tradeoff(alphas, losses, c6: float, omega=DEFAULT_OMEGA) -> TradeoffFit:
    """Least-squares fit of ``c4`` and ``c5`` with ``c6`` held fixed."""
    a = np.asarray(alphas, dtype=float)
    y = np.asarray(losses, dtype=float)
    if len(a) != len(y) or len(a) < 2:
        raise ValueError("need matching alpha and loss arrays with at least two points")
    excess = y - c6
    if np.ptp(y) <= 1e-9 * max(1.0, np.max(np.abs(y))):
        warnings.warn("flat tradeoff data: amplitude c4 is degenerate", stacklevel=2)
        return TradeoffFit(None, float(np.sqrt(np.mean(excess ** 2))), False, True, a, y)
    pos = excess > 0
    c4_0, c5_0 = max(float(excess.max()), 1e-6), 1.0
    if pos.sum() >= 2:
        slope, icpt = np.polyfit(a[pos], np.log(excess[pos]), 1)
        if slope < 0:
            c4_0, c5_0 = float(np.exp(icpt)), float(-slope)
    try:
        (c4, c5), _ = optimize.curve_fit(
            lambda x, c4, c5: c4 * np.exp(-c5 * x) + c6, a, y, p0=[c4_0, c5_0],
            bounds=([0.0, 0.0], [np.inf, np.inf]), maxfev=20_000)
    except (RuntimeError, optimize.OptimizeWarning) as exc:
        warnings.warn(f"tradeoff fit did not converge: {exc}", stacklevel=2)
        return TradeoffFit(None, math.nan, False, False, a, y)
    model_ = TradeoffModel(float(c4), float(c5), float(c6), tuple(omega))
    rmse = float(np.sqrt(np.mean((model_.accuracy_loss(a) - y) ** 2)))
    degenerate = c4 <= 1e-9 * max(1.0, abs(c6))
    if degenerate:
        warnings.warn("fitted amplitude c4 is numerically zero", stacklevel=2)
    return TradeoffFit(model_, rmse, True, bool(degenerate), a, y)


@dataclass
class TradeoffResult:
    fits: dict
    curves: dict
    csv_path: Path
    svg_path: Path
    json_path: Path


def tradeoff_points(curves: dict, mechanism: str, kind: str = "final"):
    """Per-alpha seed-averaged loss and the fixed ``c6`` from the non-private curve.

    ``final``: loss at the last round, ``c6`` the minimum over rounds.
    ``intermediate``: loss averaged over rounds 20..100, ``c6`` the same
    average of the non-private curve.
    """
    keys = sorted((k for k in curves if k[0] == mechanism), key=lambda k: float(k[1]))
    alphas = np.array([float(k[1]) for k in keys])
    base = curves[("none", "-")].mean(axis=0)
    if kind == "final":
        losses = np.array([curves[k][:, -1].mean() for k in keys])
        c6 = float(base.min())
    elif kind == "intermediate":
        window = slice(19, 100)
        losses = np.array([curves[k].mean(axis=0)[window].mean() for k in keys])
        c6 = float(base[window].mean())
    else:
        raise ValueError("kind must be 'final' or 'intermediate'")
    return alphas, losses, c6


def run_tradeoff_suite(config: ExperimentConfig, kind: str = "final") -> TradeoffResult:
    """Loss vs alpha for each private mechanism with a fitted ``L_acc``.

    Writes ``tradeoff.csv`` (``mechanism,alpha,mean_loss,fitted_loss``),
    ``tradeoff.svg`` and ``tradeoff_fit.jsonl``.
    """
    if config.alpha_schedule:
        raise ValueError("the tradeoff suite needs an alpha grid, not a schedule")
    if len(config.alphas) < 6:
        raise ValueError("the tradeoff fit needs at least 6 alpha values")
    mechs = [m for m in config.mechanisms if m != "none"]
    if not mechs:
        raise ValueError("no private mechanism selected")
    cfg = ExperimentConfig(**{**asdict(config), "mechanisms": ["none"] + mechs})
    curves = loss_curves(cfg)
    fits = {}
    for mech in mechs:
        alphas, losses, c6 = tradeoff_points(curves, mech, kind)
        fits[mech] = fit_tradeoff(alphas, losses, c6)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mechanism", "alpha", "mean_loss", "fitted_loss"])
    for mech, fit in fits.items():
        fitted = fit.model.accuracy_loss(fit.alphas) if fit.model else np.full(len(fit.alphas), np.nan)
        for a, y, yf in zip(fit.alphas, fit.losses, fitted):
            w.writerow([mech, repr(float(a)), repr(float(y)), repr(float(yf))])
    csv_path = out / "tradeoff.csv"
    csv_path.write_text(buf.getvalue())
    json_path = out / "tradeoff_fit.jsonl"
    with json_path.open("w") as fh:
        for mech, fit in fits.items():
            rec = {"name": f"fit_{mech}", "converged": fit.converged, "degenerate": fit.degenerate,
                   "rmse": fit.rmse}
            if fit.model:
                rec.update(c4=fit.model.c4, c5=fit.model.c5, c6=fit.model.c6)
            fh.write(json.dumps(rec) + "\n")

    plt = _svg_figure()
    fig, ax = plt.subplots(figsize=(6, 4))
    for mech, fit in fits.items():
        ax.plot(fit.alphas, fit.losses, "o", label=f"{mech} measured")
        if fit.model:
            xs = np.linspace(fit.alphas.min(), fit.alphas.max(), 200)
            ax.plot(xs, fit.model.accuracy_loss(xs), "-", label=f"{mech} fit")
    ax.set_xlabel("alpha")
    ax.set_ylabel("empirical loss")
    ax.legend(fontsize=7)
    svg_path = out / "tradeoff.svg"
    _save_svg(fig, svg_path)
    plt.close(fig)
    return TradeoffResult(fits, curves, csv_path, svg_path, json_path)


# statistical checks -----------------------------------------------------------

def trend_correlation(curves: dict, mechanism: str) -> float:
    """Spearman correlation between alpha and the seed-averaged final loss."""
    alphas, losses, _ = tradeoff_points(curves, mechanism, "final")
    return float(stats.spearmanr(alphas, losses).statistic)


def dispersion_test(sample_a, sample_b) -> float:
    """One-sided p-value that ``sample_a`` is less dispersed than ``sample_b``.

    Mood's rank test on median-centered samples.
    """
    a = np.asarray(sample_a, float) - np.median(sample_a)
    b = np.asarray(sample_b, float) - np.median(sample_b)
    return float(stats.mood(a, b, alternative="less").pvalue)
