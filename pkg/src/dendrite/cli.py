"""Command-line entry point. Reports are ``key: value`` lines; exit 0 means
success or the property holds, 1 that it fails, 2 invalid input."""

from __future__ import annotations

import argparse
import datetime
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .battery import DEFAULT_CONFIG, load_config, run_battery
from .ict_omega import (
    FinitePointSet,
    approximate_omega,
    build_omega_point,
    is_ict,
    is_weakly_incompressible,
    read_set,
    verify_omega_equals,
    write_set,
)
from .julia import (
    ComplexParam,
    ImageSpec,
    PartitionSpec,
    extract_kneading,
    misiurewicz_detect,
    render,
    write_ppm,
)
from .kneading import DendriteSpace, classify, resolve_tau
from .pseudo_orbit import random_pseudo_orbit, read_orbit, tau_name, validate, write_orbit
from .shadowing import (
    POLICIES,
    assign_shadow,
    canonical_shadow,
    check_pseudo_agreement,
    delta_bound,
    delta_for_epsilon,
    verify_shadowing,
)
from .symbolic import (
    ContractError,
    DepthError,
    Scale,
    SymSeq,
    agreement_depth,
    is_lambda_acceptable,
    parse_literal,
    simeq,
)


class Report:
    def __init__(self, out=None):
        self.out = out or sys.stdout

    def __call__(self, key: str, value) -> None:
        self.out.write(f"{key}: {value}\n")


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("DENDRITE_SEED", "0"))


def _scale(exp: Optional[int], value: Optional[float], name: str) -> Scale:
    if exp is not None:
        return Scale.from_exponent(exp)
    if value is not None:
        return Scale.from_value(value)
    raise ContractError(f"--{name}-exp or --{name} is required")


def _parse_c(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ContractError(f"bad complex number {text!r}") from None


def _space(text: str) -> DendriteSpace:
    return DendriteSpace.from_tau(resolve_tau(text))


# ------------------------------------------------------------ commands


def cmd_check_tau(args, rep: Report) -> int:
    tau = resolve_tau(args.tau)
    ver = is_lambda_acceptable(tau, args.depth)
    rep("tau", tau_name(tau))
    rep("verdict", "acceptable" if ver.verdict else "not-acceptable")
    rep("verified_to_depth", "unconditional" if ver.verified_to_depth is None else ver.verified_to_depth)
    if not ver.verdict:
        for k, v in ver.witness.items():
            rep(k, v)
        return 1
    return 0


def cmd_classify_tau(args, rep: Report) -> int:
    tau = resolve_tau(args.tau)
    c = classify(tau, args.depth)
    rep("tau", tau_name(tau))
    rep("kind", c.kind)
    if c.kind == "PERIODIC":
        rep("period", c.period)
    elif c.kind == "NON_RECURRENT":
        rep("horizon", c.horizon)
    else:
        rep("certified_to", c.certified_to)
        ms = c.milestones(args.milestones)
        rep("milestones", " ".join(map(str, ms.values)))
    return 0


def cmd_distance(args, rep: Report) -> int:
    tau = resolve_tau(args.tau)
    x, y = parse_literal(args.x), parse_literal(args.y)
    a = agreement_depth(x, y, tau, args.cap)
    rep("agreement", str(a))
    rep("distance", f"{2.0 ** -a.depth:.6g}" if a.exact else f"<= {2.0 ** -a.depth:.6g}")
    return 0


def cmd_simeq(args, rep: Report) -> int:
    tau = resolve_tau(args.tau)
    if len(args.x) != len(args.y):
        raise ContractError("words must have equal length")
    res = simeq(args.x, args.y, tau)
    rep("holds", str(res.holds).lower())
    if res.star_position is not None:
        rep("star_position", res.star_position)
        rep("witness", res.witness_word)
    return 0 if res.holds else 1


def cmd_orbit(args, rep: Report) -> int:
    if args.action == "gen":
        sp = _space(args.tau)
        if args.delta_exp is not None or args.delta is not None:
            delta = _scale(args.delta_exp, args.delta, "delta")
        else:
            delta = delta_for_epsilon(sp, _scale(args.eps_exp, args.eps, "eps"))
        orbit = random_pseudo_orbit(sp, delta, args.length, _seed(args), flip_rate=args.flip_rate)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                write_orbit(fh, orbit)
        rep("tau", tau_name(sp.tau))
        rep("n_delta", delta.n)
        rep("length", len(orbit))
        rep("validated", "true")
        return 0
    with open(args.file, encoding="utf-8") as fh:
        tau, scale, points = read_orbit(fh)
    if args.delta_exp is not None:
        scale = Scale.from_exponent(args.delta_exp)
    orbit = validate(points, scale, tau)
    rep("tau", tau_name(tau))
    rep("n_delta", scale.n)
    rep("length", len(orbit))
    rep("validated", str(orbit.validated).lower())
    if not orbit.validated:
        rep("first_violation", orbit.first_violation)
        return 1
    return 0


def cmd_delta_for_eps(args, rep: Report) -> int:
    sp = _space(args.tau)
    eps = _scale(args.eps_exp, args.eps, "eps")
    delta = delta_for_epsilon(sp, eps)
    rep("kind", sp.kind)
    rep("n_eps", eps.n)
    rep("bound", delta_bound(sp, eps.n))
    rep("n_delta", delta.n)
    rep("delta", f"2^-{delta.n}")
    return 0


def cmd_shadow(args, rep: Report) -> int:
    with open(args.file, encoding="utf-8") as fh:
        tau, scale, points = read_orbit(fh)
    sp = DendriteSpace.from_tau(tau)
    orbit = validate(points, scale, tau)
    if not orbit.validated:
        raise ContractError(f"orbit is not a delta pseudo-orbit (step {orbit.first_violation})")
    eps = _scale(args.eps_exp, args.eps, "eps")
    shadow = canonical_shadow(orbit, eps, sp)
    z = assign_shadow(shadow, args.policy, sp, seed=_seed(args))
    ver = verify_shadowing(orbit, z, eps, sp)
    agree = check_pseudo_agreement(orbit, eps, sp, shadow.ledger)
    rep("n_eps", eps.n)
    rep("n_delta", orbit.n_delta)
    rep("flips", len(shadow.ledger))
    rep("diamonds", " ".join(map(str, shadow.diamonds)) or "none")
    rep("shadow", z.prefix(min(len(orbit) + eps.n, args.show)))
    rep("pseudo_agreement", str(agree.holds).lower())
    rep("verified", str(ver.verified).lower())
    if not ver.verified:
        rep("first_failure", ver.first_failure)
        return 1
    return 0


def _load_set(path: str) -> tuple[DendriteSpace, FinitePointSet]:
    with open(path, encoding="utf-8") as fh:
        tau, points = read_set(fh)
    sp = DendriteSpace.from_tau(tau)
    return sp, FinitePointSet.make(points, sp)


def cmd_ict(args, rep: Report) -> int:
    sp, pset = _load_set(args.set)
    eps = _scale(args.eps_exp, args.eps, "eps")
    ok, cert = is_ict(pset, eps)
    rep("points", len(pset))
    rep("n_eps", eps.n)
    rep("ict", str(ok).lower())
    if len(pset) <= 16:
        rep("weakly_incompressible", str(is_weakly_incompressible(pset, eps)).lower())
    for k, v in cert.items():
        rep(k, " ".join(map(str, v)) if isinstance(v, (list, tuple)) else v)
    return 0 if ok else 1


def _read_word(path: str) -> tuple[SymSeq, SymSeq]:
    fields = {}
    for line in Path(path).read_text(encoding="utf-8").split("\n"):
        if ":" in line:
            k, v = line.split(":", 1)
            fields[k.strip()] = v.strip()
    if "tau" not in fields or "word" not in fields:
        raise ContractError("word file needs 'tau' and 'word' lines")
    return resolve_tau(fields["tau"]), SymSeq.from_word(fields["word"])


def _z_arg(args, tau: SymSeq) -> SymSeq:
    if args.z_file:
        _, z = _read_word(args.z_file)
        return z
    if args.z:
        return parse_literal(args.z)
    raise ContractError("--z or --z-file is required")


def _window(args, z: SymSeq, eps) -> tuple[int, int]:
    horizon = args.horizon
    if horizon is None:
        horizon = 5_000 if z.is_exact else min(5_000, z.certified_depth - eps.n - 1)
    burn_in = horizon // 4 if args.burn_in is None else args.burn_in
    return horizon, burn_in


def cmd_omega(args, rep: Report) -> int:
    eps = _scale(args.eps_exp, args.eps, "eps") if args.action != "build" else None
    if args.action == "build":
        sp, pset = _load_set(args.set)
        z, plan = build_omega_point(pset, sp, args.depth)
        rep("segments", len(plan.segments))
        rep("depth", plan.depth)
        rep("offsets", " ".join(map(str, plan.offsets[:20])))
        if args.out:
            Path(args.out).write_text(f"tau: {tau_name(sp.tau)}\nword: {z.prefix(plan.depth + 1)}\n",
                                      encoding="utf-8")
        return 0
    if args.action == "approx":
        sp = _space(args.tau)
        z = _z_arg(args, sp.tau)
        pset = approximate_omega(z, eps, sp, *_window(args, z, eps))
        rep("clusters", len(pset))
        for i, p in enumerate(pset.points):
            rep(f"point_{i}", str(p) if p.is_exact else p.prefix(eps.n + 1))
        if args.out:
            if not all(p.is_exact for p in pset.points):
                raise ContractError("only EXACT clusters can be written as a set file")
            with open(args.out, "w", encoding="utf-8") as fh:
                write_set(fh, pset)
        return 0
    sp, pset = _load_set(args.set)
    z = _z_arg(args, sp.tau)
    horizon, burn_in = _window(args, z, eps)
    res = verify_omega_equals(pset, z, eps, sp, horizon, args.min_visits, burn_in)
    for i, v in enumerate(res.visits):
        rep(f"visits_{i}", v)
    rep("missing", " ".join(map(str, res.missing)) or "none")
    rep("uncovered", " ".join(map(str, res.uncovered)) or "none")
    rep("holds", str(res.holds).lower())
    return 0 if res.holds else 1


def cmd_julia(args, rep: Report) -> int:
    param = ComplexParam(_parse_c(args.c), args.tolerance)
    if args.action == "detect":
        v = misiurewicz_detect(param, args.steps)
        rep("c", param.c)
        rep("verdict", str(v))
        rep("tolerance", args.tolerance)
        return 0
    if args.action == "kneading":
        kn = extract_kneading(param, PartitionSpec(args.theta, args.star_tolerance), args.depth, args.steps)
        rep("tau", str(kn.tau))
        rep("itinerary", kn.raw)
        ver = is_lambda_acceptable(kn.tau, 30)
        rep("acceptable", str(ver.verdict).lower())
        return 0 if ver.verdict else 1
    x0, x1, y0, y1 = (float(v) for v in args.viewport.split(","))
    spec = ImageSpec(args.width, args.height, (x0, x1, y0, y1), args.max_iter)
    img = render(param, spec)
    with open(args.out, "wb") as fh:
        write_ppm(fh, img)
    rep("width", img.width)
    rep("height", img.height)
    rep("escaped_pixels", int((img.pixels < img.max_iter).sum()))
    rep("out", args.out)
    return 0


def cmd_battery(args, rep: Report) -> int:
    path = args.config or DEFAULT_CONFIG
    if not Path(path).is_file():
        raise ContractError(f"config file not found: {path}")
    cfg = load_config(path)
    if args.criteria:
        cfg.criteria = [int(c) for c in args.criteria.split(",")]
    results = run_battery(cfg, report=lambda r: rep.out.write(r.line() + "\n"))
    failed = [r for r in results if not r.passed]
    for r in failed:
        for w in r.witnesses[:5]:
            rep(f"witness_{r.number}", w)
    rep("passed", sum(r.passed for r in results))
    rep("failed", len(failed))
    return 1 if failed else 0


# -------------------------------------------------------------- parser


def _add_tau(p, required=True):
    p.add_argument("--tau", required=required, help="literal such as '1[0]' or 'period-doubling'")


def _add_eps(p):
    p.add_argument("--eps-exp", type=int, help="eps = 2^-N")
    p.add_argument("--eps", type=float, help="decimal eps, floored to a dyadic scale")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dendrite", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--no-timestamp", action="store_true", help="omit the timestamp line")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-tau")
    _add_tau(p)
    p.add_argument("--depth", type=int, default=64)
    p.set_defaults(func=cmd_check_tau)

    p = sub.add_parser("classify-tau")
    _add_tau(p)
    p.add_argument("--depth", type=int, default=1 << 12)
    p.add_argument("--milestones", type=int, default=6)
    p.set_defaults(func=cmd_classify_tau)

    p = sub.add_parser("distance")
    _add_tau(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--cap", type=int, default=64)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("simeq")
    _add_tau(p)
    p.add_argument("--x", required=True, help="word over 0, 1, *")
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_simeq)

    p = sub.add_parser("orbit")
    p.add_argument("action", choices=["gen", "check"])
    _add_tau(p, required=False)
    _add_eps(p)
    p.add_argument("--delta-exp", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--length", type=int, default=200)
    p.add_argument("--flip-rate", type=float, default=0.3)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--file")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("delta-for-eps")
    _add_tau(p)
    _add_eps(p)
    p.set_defaults(func=cmd_delta_for_eps)

    p = sub.add_parser("shadow")
    p.add_argument("--file", required=True, help="orbit file")
    _add_eps(p)
    p.add_argument("--policy", choices=POLICIES, default="ALL_ZERO")
    p.add_argument("--seed", type=int)
    p.add_argument("--show", type=int, default=80, help="symbols of the shadow to print")
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("ict")
    p.add_argument("action", choices=["check"])
    p.add_argument("--set", required=True)
    _add_eps(p)
    p.set_defaults(func=cmd_ict)

    p = sub.add_parser("omega")
    p.add_argument("action", choices=["build", "approx", "verify"])
    _add_tau(p, required=False)
    _add_eps(p)
    p.add_argument("--set")
    p.add_argument("--depth", type=int, default=10_000)
    p.add_argument("--z", help="point literal")
    p.add_argument("--z-file", help="word file written by 'omega build'")
    p.add_argument("--horizon", type=int, default=None,
                   help="default: as far as the point is certified, capped at 5000")
    p.add_argument("--burn-in", type=int, default=None, help="default: a quarter of the horizon")
    p.add_argument("--min-visits", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("julia")
    p.add_argument("action", choices=["detect", "kneading", "render"])
    p.add_argument("--c", required=True, help="complex parameter, e.g. 'i' or '-0.1+0.65i'")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--star-tolerance", type=float, default=1e-6)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--width", type=int, default=400)
    p.add_argument("--height", type=int, default=400)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--viewport", default="-2,2,-2,2", help="xmin,xmax,ymin,ymax")
    p.add_argument("--out", default="julia.ppm")
    p.set_defaults(func=cmd_julia)

    p = sub.add_parser("battery")
    p.add_argument("--config", help="key: value file (defaults to the shipped config)")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 2,3,8")
    p.set_defaults(func=cmd_battery)
    return ap


_REQUIRES = {
    "orbit": {"gen": ["tau"], "check": ["file"]},
    "omega": {"build": ["set"], "approx": ["tau"], "verify": ["set"]},
}


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    rep = Report(out)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    for name in _REQUIRES.get(args.command, {}).get(getattr(args, "action", None), []):
        if getattr(args, name) is None:
            rep("error", f"--{name.replace('_', '-')} is required for {args.command} {args.action}")
            return 2
    if not args.no_timestamp:
        rep("timestamp", datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"))
    try:
        return args.func(args, rep)
    except (ContractError, DepthError, OSError) as exc:
        rep("error", str(exc).split("\n")[0])
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
