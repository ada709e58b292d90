"""Build a point whose omega-limit set is a given cycle, then recover the
cycle from the point's orbit.

    python3 scripts/omega_demo.py --tau "1[0]" --cycle "[0111]" --depth 4000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from dendrite.ict_omega import (
    approximate_omega,
    build_omega_point,
    cycle_set,
    is_ict,
    verify_omega_equals,
)
from dendrite.kneading import DendriteSpace, resolve_tau
from dendrite.symbolic import Scale, parse_literal


@dataclass
class OmegaConfig:
    tau: str = "1[0]"
    cycle: str = "[0111]"
    depth: int = 4000
    eps_exp: int = 4
    min_visits: int = 10


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--tau", default=OmegaConfig.tau)
    ap.add_argument("--cycle", default=OmegaConfig.cycle)
    ap.add_argument("--depth", type=int, default=OmegaConfig.depth)
    ap.add_argument("--eps-exp", type=int, default=OmegaConfig.eps_exp)
    args = ap.parse_args()
    cfg = OmegaConfig(args.tau, args.cycle, args.depth, args.eps_exp)
    sp = DendriteSpace.from_tau(resolve_tau(cfg.tau))
    eps = Scale.from_exponent(cfg.eps_exp)
    target = cycle_set(parse_literal(cfg.cycle), sp)
    print(f"target set: {[str(p) for p in target.points]}, ICT at 2^-{eps.n}: {is_ict(target, eps)[0]}")
    z, plan = build_omega_point(target, sp, cfg.depth)
    print(f"built {len(plan.segments)} segments to depth {plan.depth}")
    print(f"first offsets: {plan.offsets[:12]}")
    burn_in = cfg.depth // 4
    horizon = cfg.depth - eps.n - 1
    rep = verify_omega_equals(target, z, eps, sp, horizon, cfg.min_visits, burn_in)
    print(f"visits per point: {rep.visits}; holds: {rep.holds}")
    approx = approximate_omega(z, eps, sp, horizon, cfg.depth // 2)
    coarse = Scale.from_exponent(eps.n - 1)
    print(f"recovered {len(approx)} clusters; ICT at 2^-{coarse.n}: {is_ict(approx, coarse)[0]}")


if __name__ == "__main__":
    main()
