"""Render a Julia set to PPM and sweep the partition angle for the kneading
crosscheck.

    python3 scripts/julia_render.py --c i --out julia_i.ppm --thetas 24
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from dendrite.julia import (
    ComplexParam,
    ImageSpec,
    PartitionAmbiguity,
    PartitionSpec,
    crosscheck,
    misiurewicz_detect,
    render,
    write_ppm,
)


@dataclass
class RenderConfig:
    c: complex = 1j
    width: int = 600
    height: int = 600
    max_iter: int = 300
    out: str = "julia.ppm"
    thetas: int = 24
    samples: int = 400
    depth: int = 15
    seed: int = 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--c", default="i")
    ap.add_argument("--out", default=RenderConfig.out)
    ap.add_argument("--width", type=int, default=RenderConfig.width)
    ap.add_argument("--height", type=int, default=RenderConfig.height)
    ap.add_argument("--thetas", type=int, default=RenderConfig.thetas)
    args = ap.parse_args()
    cfg = RenderConfig(c=complex(args.c.replace("i", "j")), width=args.width, height=args.height,
                       out=args.out, thetas=args.thetas)
    param = ComplexParam(cfg.c)
    img = render(param, ImageSpec(cfg.width, cfg.height, max_iter=cfg.max_iter))
    with open(cfg.out, "wb") as fh:
        write_ppm(fh, img)
    print(f"c = {cfg.c}: {misiurewicz_detect(param)}; wrote {cfg.out}")
    print(f"{'theta':>6} {'tau':>10} {'acceptable':>10} {'rate':>6}")
    for k in range(cfg.thetas):
        theta = 2 * math.pi * k / cfg.thetas
        try:
            rep = crosscheck(param, PartitionSpec(theta=theta), cfg.depth, cfg.samples, cfg.seed)
        except PartitionAmbiguity:
            print(f"{theta:6.3f} {'ambiguous':>10}")
            continue
        print(f"{theta:6.3f} {str(rep.tau):>10} {str(rep.acceptable):>10} {rep.rate:6.3f}")


if __name__ == "__main__":
    main()
