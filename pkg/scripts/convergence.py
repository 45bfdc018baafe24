"""Loss-vs-iteration curves, trend statistics and the DVP/PVP dispersion comparison.

Usage: python3 scripts/convergence.py [configs/convergence.cfg]
"""

import sys

from dpadmm import experiments as ex


def main(path="configs/convergence.cfg"):
    config = ex.ExperimentConfig.from_file(path)
    result = ex.run_convergence_suite(config)
    for key, value in sorted(result.final_means().items()):
        print(f"{ex._column_name(key):>18s}  final mean loss {value:.4f}")
    for mech in ("dvp", "pvp"):
        if mech in config.mechanisms and len(config.alphas) > 1:
            print(f"Spearman(alpha, final loss) {mech}: {ex.trend_correlation(result.curves, mech):.3f}")
    probe = f"{min(config.alphas, key=lambda a: abs(a - 0.1)):g}"
    if len(config.seeds) >= 3 and ("dvp", probe) in result.curves and ("pvp", probe) in result.curves:
        p = ex.dispersion_test(result.curves[("dvp", probe)][:, -1], result.curves[("pvp", probe)][:, -1])
        print(f"DVP less dispersed than PVP at alpha={probe}: one-sided p = {p:.3g}")
    print(f"wrote {result.csv_path} and {result.svg_path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
