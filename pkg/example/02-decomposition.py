import argparse

import solharm as sh
from solharm.util import enable_debug

def main(samples: int, seed: int):
    sys = sh.SystemSpec("circle", 2)
    f = sh.bundled_filter("haar")
    B0 = sh.ArcSet.parse("0,0.4;0.6,1")
    A0 = B0.complement()

    # Exponential decay of the visit probability of A0
    ms = range(3, 11)
    probs = [sh.decomp.visit_probability(sys, f, A0, m) for m in ms]
    fit = sh.decomp.fit_decay_rate(ms, probs)
    print(f"b = {fit.b:.4f}, C = {fit.C:.4f}")

    # Truncated isometry of the wandering decomposition
    xi = sh.solenoid.ArcCylinder([sh.ArcSet([(0.05, 0.2)]),
                                  sh.ArcSet([(0.02, 0.3)])])
    r = sh.decomp.psi_isometry_check(sys, f, xi, B0, range(-2, 3),
                                     samples, seed)
    print(f"lhs = {r.lhs.mean.real:.5f}, rhs = {r.rhs.mean.real:.5f}, " +
          f"pass = {r.passed}")


if __name__ == "__main__":
    p = argparse.ArgumentParser("02-decomposition.py")
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--debug", action="store_true")

    args = p.parse_args()
    if args.debug:
        enable_debug()

    main(args.samples, args.seed)
