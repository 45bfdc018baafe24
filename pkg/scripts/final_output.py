"""Final-round empirical loss and misclassification rate per mechanism and alpha.

Usage: python3 scripts/final_output.py [configs/final_output.cfg]
"""

import sys

from dpadmm import experiments as ex


def main(path="configs/final_output.cfg"):
    result = ex.run_final_output_suite(ex.ExperimentConfig.from_file(path))
    for mech, label, loss, mer in result.rows:
        print(f"{mech:>5s} alpha={label:>6s}  loss {loss:.4f}  misclassification {mer:.4f}")
    print(f"wrote {result.csv_path} and {result.svg_path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
