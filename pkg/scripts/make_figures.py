"""Draw a few illustrative SVGs into figures/ (or --out).

geodesics.svg  Delaunay geodesic left of x = -2, unrestricted and with that barrier
forest.svg     directed forest toward a far sink in direction (1, 0)
probe.svg      radius-r circle and a directional arc on the Delaunay graph
"""

import argparse
import math
from pathlib import Path

from eucfpp import (Barrier, DirectionSpec, SeedStream, Window, build_delaunay, build_directed_forest,
                    nearest_vertex, restricted_shortest_path, sample_ppp, shortest_path)
from eucfpp.render import Scene


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    win = Window(0.0, 0.0, 20.0, 20.0)
    ps = sample_ppp(win, 1.0, SeedStream(args.seed, 0))
    g = build_delaunay(ps)
    s, t = nearest_vertex(ps, (-3, -15)), nearest_vertex(ps, (-3, 15))
    free = shortest_path(g, s, t)
    barred = restricted_shortest_path(g, s, t, Barrier(-2.0))
    paths = [p.vertices for p in (free, barred) if p is not None]
    Scene(win, ps.points, g.edges(), paths=paths, barriers=[-2.0]).write(out / "geodesics.svg")

    forest = build_directed_forest(g, DirectionSpec(0.0, 18.0))
    Scene(win, ps.points, tree_parent=forest.successor).write(out / "forest.svg")

    Scene(win, ps.points, g.edges(), circles=[(0.0, 0.0, 12.0)],
          arcs=[(12.0, math.pi / 4, 10.0)]).write(out / "probe.svg")
    for name in ("geodesics", "forest", "probe"):
        print(out / f"{name}.svg")


if __name__ == "__main__":
    main()
