"""End-to-end acceptance criteria.

Each test records one ``PASS``/``FAIL`` line, printed in the pytest
terminal summary (and inline under ``-s``). The shared setup is a ring of
four nodes over ``synthetic_dataset(200, 5, seed=1)`` with ``C_R = 10``,
``rho = 0.1`` and ``eta = 1``.
"""

import math
import time
import warnings

import numpy as np
import pytest
from scipy import stats

from dpadmm import admm, data, dvp, experiments as ex, model, network, noise, pvp, solver
from dpadmm.analysis import audit, bounds, lemmas

RESULTS: list[str] = []
C_R, RHO, ETA = 10.0, 0.1, 1.0


def record(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def setup():
    graph = network.build_topology("ring", 4)
    parts = data.partition(data.synthetic_dataset(200, 5, seed=1), graph)
    return parts, graph, model.logistic_loss(), model.l2_regularizer()


def acceptance_config(iters):
    return admm.AdmmConfig(model.ErmParams(C_R, RHO), eta=ETA, max_iters=iters)


def test_01_oracle_equivalence(setup):
    parts, graph, loss, reg = setup
    start = time.perf_counter()
    trace = admm.run_nonprivate(parts, graph, loss, reg, acceptance_config(500))
    elapsed = time.perf_counter() - start
    erm = model.ErmParams(C_R, RHO)
    f_star = admm.centralized_solve(parts, loss, reg, erm, per_node_reg=True)
    z = lambda f: model.centralized_objective(f, parts, loss, reg, erm, per_node_reg=True)
    gap = abs(z(trace.final().mean(axis=0)) - z(f_star)) / abs(z(f_star))
    res = trace.records[-1].residual
    record(1, "oracle equivalence", res <= 1e-4 and gap <= 1e-3 and elapsed < 10,
           f"residual {res:.2e}, relative gap {gap:.2e}, {elapsed:.1f} s")


def _random_dvp_node(rng, loss, reg, B=50, d=5, n_p=2):
    X = rng.standard_normal((B, d))
    X /= np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1.0)
    ds = data.NodeDataset(X, rng.choice([-1, 1], B))
    state = admm.NodeState(0.3 * rng.standard_normal(d), 0.3 * rng.standard_normal(d))
    return ds, state, list(0.3 * rng.standard_normal((n_p, d)))


def test_02_kkt_round_trip(setup):
    _, _, loss, reg = setup
    cfg = admm.AdmmConfig(model.ErmParams(C_R, RHO), eta=ETA, inner_tol=1e-10)
    worst = 0.0
    for k in range(100):
        rng = np.random.default_rng([2, k])
        ds, state, nbrs = _random_dvp_node(rng, loss, reg)
        params = dvp.dvp_calibrate(0.5, loss.c1, len(ds), C_R, RHO, ETA, len(nbrs))
        eps = noise.sample_noise_batch(ds.dim, params.zeta, 1, rng)[0]
        mu = dvp.perturb_dual(state.lam, eps, C_R, len(ds))
        f = dvp.primal_update_dvp(state, nbrs, ds, loss, reg, cfg, params, mu)
        rec = dvp.kkt_recover_noise(f, state, nbrs, ds, loss, reg, cfg, params)
        worst = max(worst, float(np.max(np.abs(rec - eps))))
    record(2, "KKT noise round trip", worst <= 1e-6, f"max abs error {worst:.2e} over 100 instances")


def _neighbor(rng, ds):
    x = rng.standard_normal(ds.dim)
    x /= max(np.linalg.norm(x), 1.0)
    return data.neighboring_dataset(ds, int(rng.integers(len(ds))),
                                    data.DataPoint(x, int(rng.choice([-1, 1]))))


def test_03_sensitivity(setup):
    _, _, loss, reg = setup
    cfg = acceptance_config(1)
    dual_worst = 0.0
    for k in range(1000):
        rng = np.random.default_rng([3, k])
        ds, state, nbrs = _random_dvp_node(rng, loss, reg)
        params = dvp.DvpParams(0.5, 0.4, 0.0, 0.2)
        f = rng.standard_normal(ds.dim)
        e1 = dvp.kkt_recover_noise(f, state, nbrs, ds, loss, reg, cfg, params)
        e2 = dvp.kkt_recover_noise(f, state, nbrs, _neighbor(rng, ds), loss, reg, cfg, params)
        dual_worst = max(dual_worst, float(np.linalg.norm(e1 - e2)))
    bound = pvp.pvp_sensitivity_bound(C_R, RHO, 50)
    tight = admm.AdmmConfig(model.ErmParams(C_R, RHO), eta=ETA, inner_tol=1e-10)
    primal_worst = 0.0
    for k in range(200):
        rng = np.random.default_rng([30, k])
        ds, state, nbrs = _random_dvp_node(rng, loss, reg)
        state.last_noise = rng.standard_normal(ds.dim)
        fa = pvp.primal_update_pvp(state, nbrs, ds, loss, reg, tight)
        fb = pvp.primal_update_pvp(state, nbrs, _neighbor(rng, ds), loss, reg, tight)
        primal_worst = max(primal_worst, float(np.linalg.norm(fa - fb)))
    record(3, "sensitivity bounds", dual_worst <= 2 and primal_worst <= bound + 1e-6,
           f"dual noise gap {dual_worst:.3f} <= 2, argmin gap {primal_worst:.3f} <= {bound:g}")


def test_04_noise_law():
    start = time.perf_counter()
    details, ok = [], True
    for d in (1, 3, 10):
        zeta = 2.0
        r = np.linalg.norm(noise.sample_noise_batch(d, zeta, 100_000,
                                                    noise.stream(4, d, 0, noise.MONTE_CARLO)), axis=1)
        rel = abs(r.mean() - d / zeta) / (d / zeta)
        ks = stats.kstest(r, stats.gamma(a=d, scale=1 / zeta).cdf).statistic
        ok &= rel <= 0.02 and ks <= 0.01
        details.append(f"d={d}: mean err {rel:.4f}, KS {ks:.4f}")
    worst_cov = 1.0
    for k in (1, 3, 10):
        for delta in (0.2, 0.05, 0.01):
            theta = 0.5
            r = np.linalg.norm(noise.sample_noise_batch(
                k, 1 / theta, 100_000, noise.stream(40, k, int(1 / delta), noise.MONTE_CARLO)), axis=1)
            cov = float(np.mean(r < noise.gamma_tail_threshold(k, theta, delta)))
            ok &= cov >= 1 - delta
            worst_cov = min(worst_cov, cov - (1 - delta))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    record(4, "noise law", ok, "; ".join(details) + f"; min coverage margin {worst_cov:.4f}; "
           f"{elapsed:.1f} s")


@pytest.mark.parametrize("mech,alpha", [("dvp", 0.2), ("dvp", 0.5), ("pvp", 0.2), ("pvp", 0.5)])
def test_05_privacy_audit(mech, alpha):
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = audit.audit_privacy(mech, alpha=alpha, zeta_rule="proof_half")
    elapsed = time.perf_counter() - start
    record(5, f"privacy audit {mech} alpha={alpha}", rep.passed and elapsed < 300,
           f"epsilon_hat {rep.epsilon_hat:.3f} <= {alpha + 0.2:.1f}, {elapsed:.1f} s")


def test_05_privacy_audit_control():
    inst = audit.default_audit_instance()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = audit.audit_privacy("dvp", inst, 0, inst.dataset.point(0), alpha=0.5)
    record(5, "privacy audit identical-dataset control", rep.epsilon_hat <= 0.1,
           f"epsilon_hat {rep.epsilon_hat:.3f} <= 0.1")


def test_06_mechanism_off(setup):
    parts, graph, loss, reg = setup
    cfg = acceptance_config(100)
    ref = admm.run_nonprivate(parts, graph, loss, reg, cfg, seed=6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gap_d = float(np.max(np.abs(dvp.run_dvp(parts, graph, loss, reg, cfg, 1e6, seed=6).f - ref.f)))
        gap_p = float(np.max(np.abs(pvp.run_pvp(parts, graph, loss, reg, cfg, 1e6, seed=6).f - ref.f)))
    record(6, "mechanism-off limit", gap_d <= 1e-3 and gap_p <= 1e-3,
           f"max deviation dvp {gap_d:.1e}, pvp {gap_p:.1e}")


GRID = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0]


@pytest.fixture(scope="module")
def curves(tmp_path_factory):
    cfg = ex.ExperimentConfig(alphas=GRID, seeds=list(range(20)), c_r=C_R, rho=RHO, eta=ETA,
                              iterations=100, output_dir=str(tmp_path_factory.mktemp("acc")))
    return ex.loss_curves(cfg)


def test_07_tradeoff_trend(curves):
    fig3 = {k: v for k, v in curves.items() if k[0] == "none" or float(k[1]) in (0.01, 0.1, 0.5, 1)}
    rhos = {m: ex.trend_correlation(fig3, m) for m in ("dvp", "pvp")}
    base = fig3[("none", "-")][:, -1].mean()
    worst_private = min(v[:, -1].mean() for k, v in fig3.items() if k[0] != "none")
    p_disp = ex.dispersion_test(fig3[("dvp", "0.1")][:, -1], fig3[("pvp", "0.1")][:, -1])
    if p_disp > 0.1:
        warnings.warn(f"DVP is not less dispersed than PVP at alpha = 0.1 (p = {p_disp:.3f})")
    record(7, "tradeoff trend", all(r <= -0.8 for r in rhos.values()) and base <= worst_private,
           f"Spearman dvp {rhos['dvp']:.2f}, pvp {rhos['pvp']:.2f}; non-private {base:.3f} <= "
           f"best private {worst_private:.3f}; dispersion p {p_disp:.1e}")


def test_08_curve_fit(curves):
    a = np.array(GRID)
    synth = ex.fit_tradeoff(a, 0.2 * np.exp(-25 * a) + 0.1, c6=0.1)
    ok = (synth.converged and abs(synth.model.c4 - 0.2) <= 0.01 and abs(synth.model.c5 - 25) <= 1.25)
    details = [f"synthetic c4 {synth.model.c4:.4f}, c5 {synth.model.c5:.3f}"]
    for mech in ("dvp", "pvp"):
        alphas, losses, c6 = ex.tradeoff_points(curves, mech, "final")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fit = ex.fit_tradeoff(alphas, losses, c6)
        ok &= fit.converged and math.isfinite(fit.rmse)
        details.append(f"{mech} converged={fit.converged} rmse {fit.rmse:.3g}")
    record(8, "curve-fit self-consistency", ok, "; ".join(details))


@pytest.mark.parametrize("which", ["8", "11", "12"])
def test_09_lemma_checkers(which):
    fn = {"8": lambda: lemmas.check_lemma8(alpha_hat=0.5, trials=10_000),
          "11": lambda: lemmas.check_lemma11(alpha=0.5, trials=10_000),
          "12": lambda: lemmas.check_lemma12(alpha=0.5, trials=10_000)}[which]
    start = time.perf_counter()
    rep = fn()
    elapsed = time.perf_counter() - start
    record(9, f"lemma {which} checker", rep.passed and elapsed < 120,
           f"frequency {rep.frequency:.4f} >= {rep.threshold:.4f}, {elapsed:.1f} s")


def test_10_bound_calculators():
    exact = bounds.bound_nonprivate(bounds.BoundInputs(1, 0.1, math.exp(-1), c_r=1, beta=1))
    violations = 0
    for case in range(100):
        rng = np.random.default_rng([10, case])
        v = dict(norm_f0=rng.uniform(0.1, 5), alpha_acc=rng.uniform(0.05, 0.9),
                 delta=rng.uniform(0.01, 0.5), c_r=rng.uniform(0.1, 50), n_p=int(rng.integers(1, 8)),
                 d=int(rng.integers(1, 50)), eta=rng.uniform(0.1, 5))
        a = rng.uniform(0.05, 1)
        base = bounds.all_bounds(bounds.BoundInputs(**v), a)
        for key, sign in (("norm_f0", 1), ("c_r", 1), ("d", 1), ("n_p", 1), ("alpha_acc", -1),
                          ("delta", -1)):
            up = dict(v)
            up[key] = v[key] + 1 if key in ("d", "n_p") else v[key] * 1.1
            new = bounds.all_bounds(bounds.BoundInputs(**up), a)
            violations += sum(sign * (new[k] - base[k]) < -1e-12 * base[k] for k in base)
        lower = bounds.all_bounds(bounds.BoundInputs(**v), a * 1.1)
        violations += sum(lower[k] > base[k] * (1 + 1e-12) for k in base)
    record(10, "bound calculators", exact == 100.0 and violations == 0,
           f"bound_nonprivate = {exact!r}, {violations} monotonicity violations")
