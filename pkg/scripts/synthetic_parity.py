"""Even-versus-mixed-parity vectors: naive Bayes and forest accuracy over several seeds.

    python scripts/synthetic_parity.py --seeds 5 --dim 100 --count 5000
"""

import argparse

import numpy as np

from curveml.experiments import synthetic_parity_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--count", type=int, default=5000, help="vectors per class")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    rows = []
    print("seed,nb_accuracy,gaussian_nb_accuracy,forest_accuracy")
    for seed in range(args.seeds):
        r = synthetic_parity_experiment(args.dim, args.count, seed=seed, workers=args.workers)
        rows.append([r["nb_accuracy"], r["gaussian_nb_accuracy"], r["forest_accuracy"]])
        print(f"{seed},{rows[-1][0]:.4f},{rows[-1][1]:.4f},{rows[-1][2]:.4f}")
    mean = np.mean(rows, axis=0)
    print(f"mean,{mean[0]:.4f},{mean[1]:.4f},{mean[2]:.4f}")


if __name__ == "__main__":
    main()
