"""Pick the regularization weight with the lowest final loss at alpha = 0.3.

Usage: python3 scripts/select_rho.py [config] [mechanism] [rho,rho,...]
"""

import sys

from dpadmm import experiments as ex


def main(path="configs/convergence.cfg", mechanism="dvp", grid="0.001,0.00316,0.01,0.0316,0.1,0.316,1"):
    config = ex.ExperimentConfig.from_file(path)
    best, scores = ex.select_rho(config, [float(r) for r in grid.split(",")], mechanism)
    for rho, loss in scores.items():
        print(f"rho={rho:<8g} final mean loss {loss:.4f}{'  <- best' if rho == best else ''}")


if __name__ == "__main__":
    main(*sys.argv[1:])
