"""10-fold CV error of reference classifiers on downloaded UCI/KEEL datasets.

The datasets are not bundled. Put CSV files with the class in the last
column under ``--data-dir`` (thyroid.csv, vehicle.csv, page-blocks.csv) and
run this script; missing files are skipped.
"""

import argparse
from pathlib import Path

import pandas as pd

from catglm.data import load_csv
from catglm.experiments import classifier_grid, kfold_cv

DATASETS = ("thyroid", "vehicle", "page-blocks")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", type=Path, default=Path("data/uci"))
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for name in DATASETS:
        path = args.data_dir / f"{name}.csv"
        if not path.exists():
            print(f"{name}: not found at {path}, skipped")
            continue
        response = pd.read_csv(path, nrows=0).columns[-1]
        data = load_csv(path, response, standardize=True)
        classifiers, groups = classifier_grid(data)
        res = kfold_cv(classifiers, data, args.k, args.seed, groups=groups)
        errs = res.mean_error
        fixed = res.best(groups["fixed_reference"])
        full = res.best(groups["all_references"])
        print(f"{name}: logistic {100 * errs['logistic']:.2f}%  best fixed-reference {fixed} {100 * errs[fixed]:.2f}%  "
              f"best any-reference {full} {100 * errs[full]:.2f}%")


if __name__ == "__main__":
    main()
