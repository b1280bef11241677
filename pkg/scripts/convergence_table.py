"""Print error and log-log slope for almost-sure sweeps on the built-in fixtures."""

import argparse

from itersig.ergodic_lab import as_sweep, continuous_sweep, geometric_checkpoints
from itersig.processes import IIDModel, MarkovModel, RotationModel

FIXTURES = {
    "bernoulli": (IIDModel([[0.0], [1.0]], [0.5, 0.5]), [[1, 1], [1, 1, 1]]),
    "markov2": (MarkovModel([[0.9, 0.1], [0.5, 0.5]], [[0.0], [1.0]]), [[1, 1], [1, 1, 1]]),
    "markov3": (
        MarkovModel([[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.3, 0.3, 0.4]], [[1.0, 0.5], [2.0, -0.5], [0.5, 1.0]]),
        [[1, 2], [2, 1, 1]],
    ),
    "rotation": (RotationModel(((1.0, [1.0], []), (0.5, [0.3], [1.0])), x0=0.1), [[1, 2], [2, 1, 2]]),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=int, default=1000)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--step", type=float, default=None, help="use the piecewise-constant path with this step")
    args = ap.parse_args()
    cps = geometric_checkpoints(args.start, args.count)
    print(f"{'fixture':10} {'word':8} {'n_K':>10} {'e_1':>10} {'e_K':>10} {'slope':>7}")
    for name, (model, words) in FIXTURES.items():
        for w in words:
            if args.step is None:
                rep = as_sweep(model, w, cps, args.seed)
            else:
                rep = continuous_sweep(model, w, args.step, cps, args.seed)
            slope = "n/a" if rep.slope is None else f"{rep.slope:.2f}"
            print(f"{name:10} {str(rep.word):8} {cps[-1]:>10} {rep.errors[0]:10.3e} {rep.errors[-1]:10.3e} {slope:>7}")


if __name__ == "__main__":
    main()
