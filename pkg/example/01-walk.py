import argparse

import numpy as np
import solharm as sh
from solharm.util import enable_debug

def main(seed: int):
    sys = sh.SystemSpec("circle", 2)
    f = sh.bundled_filter("d4")

    # 1000 walks of 8 steps from the same root
    paths = sh.boundary.sample_paths(sys, f, 0.1234477851, 8, 1000, seed)
    print(paths.shape)

    # Lyapunov exponent and a typical Birkhoff average
    a = sh.filter.lyapunov(f, sys)
    print(f"lyapunov: {a.value:.6f} +/- {a.error:.1e}")
    print(f"birkhoff: {sh.decomp.birkhoff_sum(sys, f, 0.1234477851, 2000):.6f}")

    # Mean of theta_1 under mu_inf
    Z = sh.solenoid.sample_mu_inf_batch(sys, f, 1000, seed=seed)
    print(np.mean(Z.theta(1)))


if __name__ == "__main__":
    p = argparse.ArgumentParser("01-walk.py")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--debug", action="store_true")

    args = p.parse_args()
    if args.debug:
        enable_debug()

    main(args.seed)
