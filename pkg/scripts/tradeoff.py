"""Loss vs alpha, the fitted accuracy model and the alpha that maximizes utility minus loss.

Usage: python3 scripts/tradeoff.py [configs/tradeoff.cfg] [final|intermediate]
"""

import sys

from dpadmm import experiments as ex


def main(path="configs/tradeoff.cfg", kind="final"):
    config = ex.ExperimentConfig.from_file(path)
    result = ex.run_tradeoff_suite(config, kind=kind)
    span = (min(config.alphas), max(config.alphas))
    for mech, fit in result.fits.items():
        if fit.model is None:
            print(f"{mech}: no usable fit (degenerate={fit.degenerate})")
            continue
        m = fit.model
        print(f"{mech}: c4={m.c4:.4g} c5={m.c5:.4g} c6={m.c6:.4g} rmse={fit.rmse:.3g} "
              f"chosen alpha={ex.choose_alpha(m, span):.4f}")
    print(f"wrote {result.csv_path}, {result.json_path} and {result.svg_path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
