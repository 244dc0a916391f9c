import argparse

import numpy as np
import solharm as sh
from solharm.util import enable_debug

def main(depth: int):
    sys = sh.SystemSpec("circle", 2)
    f = sh.bundled_filter("d4")

    T = sh.tree.build_tree(sys, f, 0.1234477851, depth)
    print(f"nodes: {len(T)}, regular: {T.report.regular}")

    # Nodes at the deepest level with their cumulative weights
    last = np.nonzero(T.level == depth)[0]
    print(T.Wn[last])

    # Martin kernel from the root to every node
    K = sh.tree.martin_matrix(T)
    print(K[0, last])


if __name__ == "__main__":
    p = argparse.ArgumentParser("00-tree.py")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--debug", action="store_true")

    args = p.parse_args()
    if args.debug:
        enable_debug()

    main(args.depth)
