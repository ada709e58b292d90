"""Numeric quadratic maps f_c(z) = z^2 + c: Misiurewicz detection, kneading
extraction through a half-plane partition, Julia sampling and rendering."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import BinaryIO, Optional

import numpy as np

from .kneading import classify
from .symbolic import ONE, STAR, ZERO, ContractError, SymSeq, is_admissible, is_lambda_acceptable

ESCAPE_RADIUS = 2.0
BURN_IN = 50


@dataclass(frozen=True)
class ComplexParam:
    c: complex
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ContractError("tolerance must be positive")


@dataclass(frozen=True)
class OrbitRecord:
    """Samples z_0 = 0, z_1 = c, ...; preperiod/period are counted from z_1."""

    samples: tuple
    preperiod: Optional[int] = None
    period: Optional[int] = None
    escaped_at: Optional[int] = None


def iterate_orbit(param: ComplexParam, steps: int) -> OrbitRecord:
    if steps < 1:
        raise ContractError("steps must be >= 1")
    c = complex(param.c)
    z = 0j
    samples = [z]
    escaped = None
    for k in range(1, steps + 1):
        z = z * z + c
        samples.append(z)
        if abs(z) > ESCAPE_RADIUS:
            escaped = k
            break
    if escaped is not None:
        return OrbitRecord(tuple(samples), escaped_at=escaped)
    tol = param.tolerance
    # first j whose sample repeats an earlier one, confirmed over a full period
    for j in range(2, len(samples)):
        for i in range(1, j):
            per = j - i
            if i + 2 * per > len(samples) - 1:
                continue
            if all(abs(samples[i + k] - samples[j + k]) < tol for k in range(per)):
                return OrbitRecord(tuple(samples), preperiod=i - 1, period=per)
    return OrbitRecord(tuple(samples))


@dataclass(frozen=True)
class Verdict:
    kind: str
    preperiod: Optional[int] = None
    period: Optional[int] = None
    tolerance: float = 0.0

    def __str__(self) -> str:
        if self.kind == "MISIUREWICZ":
            return f"MISIUREWICZ{{{self.preperiod},{self.period}}}"
        return self.kind


def misiurewicz_detect(param: ComplexParam, steps: int = 200) -> Verdict:
    rec = iterate_orbit(param, steps)
    tol = param.tolerance
    if rec.escaped_at is not None:
        return Verdict("ESCAPES", tolerance=tol)
    if rec.period is None:
        return Verdict("UNDECIDED", tolerance=tol)
    cyc = rec.samples[rec.preperiod + 1:rec.preperiod + 1 + rec.period]
    if rec.preperiod == 0 or any(abs(z) < tol for z in cyc):
        return Verdict("PERIODIC_CRITICAL", tolerance=tol)
    return Verdict("MISIUREWICZ", rec.preperiod, rec.period, tol)


@dataclass(frozen=True)
class PartitionSpec:
    """ONE above the line through 0 at angle theta, ZERO below, STAR near 0."""

    theta: float = 0.0
    star_tolerance: float = 1e-6

    def symbol(self, z: complex) -> str:
        if abs(z) < self.star_tolerance:
            return STAR
        side = (z * cmath.exp(-1j * self.theta)).imag
        if abs(side) < self.star_tolerance:
            raise PartitionAmbiguity(z)
        return ONE if side > 0 else ZERO


class PartitionAmbiguity(ContractError):
    def __init__(self, z: complex):
        super().__init__(f"point {z:.6g} lies on the partition line; adjust theta")
        self.z = z


@dataclass(frozen=True)
class Kneading:
    tau: SymSeq
    raw: str
    verdict: Verdict


def extract_kneading(param: ComplexParam, partition: PartitionSpec, depth: int = 20,
                     steps: int = 200) -> Kneading:
    """Itinerary of the critical value folded into EXACT form on the detected cycle."""
    v = misiurewicz_detect(param, steps)
    if v.kind != "MISIUREWICZ":
        raise ContractError(f"parameter is not Misiurewicz ({v})")
    rec = iterate_orbit(param, max(steps, depth + 1))
    syms = [partition.symbol(z) for z in rec.samples[1:v.preperiod + v.period + 1]]
    pre, per = "".join(syms[:v.preperiod]), "".join(syms[v.preperiod:])
    tau = SymSeq.exact(pre, per, label=f"c={param.c}")
    return Kneading(tau, tau.prefix(depth), v)


# ------------------------------------------------------------- sampling


def _inverse_chain(param: ComplexParam, length: int, rng: np.random.Generator) -> list[complex]:
    c = complex(param.c)
    z = 1.0 + 0j
    signs = rng.integers(0, 2, size=BURN_IN + length)
    out = []
    for k, s in enumerate(signs):
        z = cmath.sqrt(z - c)
        if s:
            z = -z
        if k >= BURN_IN:
            out.append(z)
    return out


def sample_julia(param: ComplexParam, count: int, seed: int = 0) -> list[complex]:
    """Random-sign inverse iteration after a fixed burn-in."""
    if count < 1:
        raise ContractError("count must be >= 1")
    return _inverse_chain(param, count, np.random.default_rng(seed))


# ------------------------------------------------------------- rendering


@dataclass(frozen=True)
class ImageSpec:
    width: int = 200
    height: int = 200
    viewport: tuple = (-2.0, 2.0, -2.0, 2.0)
    max_iter: int = 200

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ContractError("image dimensions must be positive")


@dataclass(frozen=True)
class JuliaImage:
    width: int
    height: int
    viewport: tuple
    pixels: np.ndarray = field(repr=False)
    max_iter: int = 0


def pixel_grid(spec: ImageSpec) -> np.ndarray:
    """Row 0 is the top edge (largest imaginary part)."""
    x0, x1, y0, y1 = spec.viewport
    xs = np.linspace(x0, x1, spec.width)
    ys = np.linspace(y1, y0, spec.height)
    return xs[None, :] + 1j * ys[:, None]


def render(param: ComplexParam, spec: ImageSpec) -> JuliaImage:
    """Escape-time counts: the first k with |f^k(z)| > 2, else max_iter."""
    z = pixel_grid(spec)
    counts = np.full(z.shape, spec.max_iter, dtype=np.int64)
    alive = np.ones(z.shape, dtype=bool)
    c = complex(param.c)
    for k in range(spec.max_iter):
        out = alive & (np.abs(z) > ESCAPE_RADIUS)
        counts[out] = k
        alive &= ~out
        if not alive.any():
            break
        z = np.where(alive, z * z + c, z)
    return JuliaImage(spec.width, spec.height, spec.viewport, counts, spec.max_iter)


def to_gray(img: JuliaImage) -> np.ndarray:
    top = max(img.max_iter, 1)
    return (img.pixels * 255 // top).astype(np.uint8)


def write_ppm(stream: BinaryIO, img: JuliaImage) -> None:
    g = to_gray(img)
    stream.write(f"P6\n{img.width} {img.height}\n255\n".encode("ascii"))
    stream.write(np.repeat(g[:, :, None], 3, axis=2).tobytes())


def read_ppm(stream: BinaryIO) -> np.ndarray:
    """Returns the (height, width, 3) uint8 raster."""
    data = stream.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P6" or tokens[3] != b"255":
        raise ContractError("not a P6 maxval-255 image")
    w, h = int(tokens[1]), int(tokens[2])
    raster = np.frombuffer(data[pos + 1:pos + 1 + 3 * w * h], dtype=np.uint8)
    return raster.reshape(h, w, 3)


# ----------------------------------------------------------- crosscheck


@dataclass
class CrosscheckReport:
    tau: SymSeq
    acceptable: bool
    kind: Optional[str]
    sampled: int
    admissible: int
    failures: list = field(default_factory=list)
    acceptability_witness: Optional[dict] = None

    @property
    def rate(self) -> float:
        return self.admissible / self.sampled if self.sampled else 0.0


def crosscheck(param: ComplexParam, partition: PartitionSpec, depth: int = 15,
               samples: int = 400, seed: int = 0, window: int = 32) -> CrosscheckReport:
    """Extracted tau through acceptability and classification, then the
    itineraries of inverse-iteration samples through admissibility."""
    kn = extract_kneading(param, partition, depth)
    tau = kn.tau
    acc = is_lambda_acceptable(tau, max(depth, 30))
    kind = classify(tau).kind if acc.verdict else None
    rep = CrosscheckReport(tau, acc.verdict, kind, 0, 0,
                           acceptability_witness=None if acc.verdict else acc.witness)
    if not acc.verdict:
        return rep
    length = depth + 1 + window
    chain = _inverse_chain(param, samples + length, np.random.default_rng(seed))
    for s in range(samples):
        # f maps chain[k+1] to chain[k], so the forward orbit reads backwards
        k = s + length - 1
        try:
            word = "".join(partition.symbol(chain[k - j]) for j in range(length))
        except PartitionAmbiguity:
            rep.sampled += 1
            rep.failures.append(s)
            continue
        rep.sampled += 1
        try:
            ok = is_admissible(SymSeq.from_word(word), tau, depth=depth).verdict
        except ContractError:
            ok = False
        if ok:
            rep.admissible += 1
        else:
            rep.failures.append(s)
    return rep
