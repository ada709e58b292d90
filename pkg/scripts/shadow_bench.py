"""How far below the sufficient delta_eps does shadowing keep working?

For each kneading sequence and eps = 2^-N_eps, sweep N_delta from N_eps up to
the sufficient bound, shadow seeded pseudo-orbits with the canonical shadow
and count failures. Prints one row per (tau, N_eps, N_delta).

    python3 scripts/shadow_bench.py --taus "[10*]" "1[0]" --eps-exps 3 4 --orbits 40
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from dendrite.kneading import DendriteSpace, resolve_tau
from dendrite.pseudo_orbit import random_pseudo_orbit
from dendrite.shadowing import (
    assign_shadow,
    canonical_shadow,
    check_pseudo_agreement,
    delta_for_epsilon,
    verify_shadowing,
)
from dendrite.symbolic import Scale


@dataclass
class BenchConfig:
    taus: list = field(default_factory=lambda: ["[10*]", "1[0]"])
    eps_exps: list = field(default_factory=lambda: [3, 4])
    orbits: int = 40
    length: int = 150
    flip_rate: float = 0.5
    policies: list = field(default_factory=lambda: ["ALL_ZERO", "ALL_ONE"])
    steps: int = 8
    seed: int = 7


def sweep(cfg: BenchConfig):
    for text in cfg.taus:
        sp = DendriteSpace.from_tau(resolve_tau(text))
        for ne in cfg.eps_exps:
            eps = Scale.from_exponent(ne)
            top = delta_for_epsilon(sp, eps).n
            stride = max(1, (top - ne) // cfg.steps)
            grid = sorted(set(range(ne, top, stride)) | {top})
            for nd in grid:
                fails = agree_fails = 0
                runs = 0
                for r in range(cfg.orbits):
                    orbit = random_pseudo_orbit(sp, Scale.from_exponent(nd), cfg.length,
                                                cfg.seed + 1000 * nd + r, flip_rate=cfg.flip_rate,
                                                column="smallest" if r % 2 else "uniform")
                    shadow = canonical_shadow(orbit, eps, sp, check_scale=False)
                    agree_fails += not check_pseudo_agreement(orbit, eps, sp, shadow.ledger).holds
                    for policy in cfg.policies:
                        z = assign_shadow(shadow, policy, sp, seed=r)
                        fails += not verify_shadowing(orbit, z, eps, sp).verified
                        runs += 1
                yield text, ne, nd, top, runs, fails, agree_fails


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--taus", nargs="+")
    ap.add_argument("--eps-exps", nargs="+", type=int)
    ap.add_argument("--orbits", type=int)
    ap.add_argument("--length", type=int)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()
    cfg = BenchConfig()
    for key in ("taus", "eps_exps", "orbits", "length", "seed"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    t0 = time.perf_counter()
    print(f"{'tau':>8} {'N_eps':>5} {'N_delta':>7} {'bound':>5} {'runs':>5} {'shadow_fail':>11} {'agree_fail':>10}")
    for text, ne, nd, top, runs, fails, agree in sweep(cfg):
        print(f"{text:>8} {ne:>5} {nd:>7} {top:>5} {runs:>5} {fails:>11} {agree:>10}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
