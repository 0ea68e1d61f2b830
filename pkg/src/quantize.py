"""
Stochastic quantization and two's-complement field embedding.

A real vector w is rounded to the grid Z/q, scaled by q to integers and
embedded in F_p with negative integers mapped to p + z. Inside the protocol
rationals with denominator q are carried as their integer numerators; real
division happens only when the server converts results back.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import BadParams, OutOfRange, OverflowViolation
from .field import PrimeField

logger = logging.getLogger(__name__)

# Numerators beyond this cannot be represented exactly after the float product.
_MAX_NUMERATOR = 2**62


class OverflowMode(str, Enum):
    DISTANCE = "distance"
    AGGREGATE = "aggregate"


@dataclass(frozen=True)
class QuantConfig:
    """Quantization level q together with the field it embeds into."""

    q: int
    field: PrimeField

    def __post_init__(self):
        if int(self.q) < 1:
            raise BadParams(f"quantization level must be >= 1, got {self.q}")


@dataclass(frozen=True)
class QuantizedModel:
    """Field-embedded model phi(q * Q_q(w))."""

    vec: np.ndarray

    @property
    def dim(self):
        return len(self.vec)

    def numerators(self, field):
        """Recover the integer vector q * Q_q(w) this model embeds."""
        return unmap_phi_vector(self.vec, field)


def round_numerators(w, q, rng):
    """
    Stochastically round q * w to integers, elementwise.

    Each coordinate becomes floor(q*x) + 1 with probability q*x - floor(q*x)
    and floor(q*x) otherwise, so the result divided by q is an unbiased
    estimate of x with variance at most 1/(4q^2).

    Args:
        w: Real vector (finite entries)
        q (int): Quantization level
        rng (np.random.Generator): Randomness source

    Returns:
        np.ndarray: int64 numerators q * Q_q(w)
    """
    w = np.asarray(w, dtype=np.float64)
    if not np.all(np.isfinite(w)):
        raise ValueError("cannot quantize a vector with NaN or infinite entries")
    scaled = w * q
    if w.size and np.max(np.abs(scaled)) >= _MAX_NUMERATOR:
        raise OutOfRange(f"q*w reaches {np.max(np.abs(scaled)):.3g}")
    low = np.floor(scaled)
    frac = scaled - low
    # One draw per coordinate keeps stream consumption independent of w.
    up = rng.random(w.shape) < frac
    return low.astype(np.int64) + up.astype(np.int64)


def stochastic_round(x, q, rng):
    """Quantize a single real to the grid Z/q; returns an exact Fraction."""
    numerator = round_numerators(np.array([x]), q, rng)[0]
    return Fraction(int(numerator), int(q))


def map_phi(z, field):
    """Embed an integer with |z| < (p-1)/2 into F_p (two's complement)."""
    z = int(z)
    if abs(z) >= field.half:
        raise OutOfRange(f"|{z}| >= (p-1)/2 = {field.half}")
    return z if z >= 0 else field.p + z


def map_phi_vector(z, field):
    z = np.asarray(z)
    if z.size:
        magnitudes = np.abs(z.astype(object)) if z.dtype == object else np.abs(z)
        worst = int(np.argmax(magnitudes))
        if int(magnitudes[worst]) >= field.half:
            raise OutOfRange(
                f"coordinate {worst}: |{int(z[worst])}| >= (p-1)/2 = {field.half}"
            )
    return field.vector(z)


def unmap_phi(e, field):
    """Inverse embedding: e if e < (p-1)/2 else e - p."""
    e = int(e)
    return e if e < field.half else e - field.p


def unmap_phi_vector(v, field):
    if field.p >= 2**63:
        return np.asarray([unmap_phi(e, field) for e in v], dtype=object)
    ints = np.asarray(v).astype(np.int64)
    return np.where(ints < field.half, ints, ints - field.p)


def quantize_model(w, cfg, rng):
    """
    Quantize a real model vector into the field.

    Returns:
        QuantizedModel: phi(q * Q_q(w)) elementwise

    Raises:
        OutOfRange: If some q * Q_q(w_k) does not fit the field
    """
    numerators = round_numerators(w, cfg.q, rng)
    return QuantizedModel(vec=map_phi_vector(numerators, cfg.field))


def dequantize_distance(e, cfg):
    """Convert a field-domain squared distance back to the real domain."""
    return unmap_phi(e, cfg.field) / cfg.q**2


def dequantize_aggregate(v, cfg):
    """Convert a field-domain sum of quantized models back to reals."""
    ints = unmap_phi_vector(v, cfg.field)
    return np.asarray(ints, dtype=np.float64) / cfg.q


def _labelled(preimages):
    if isinstance(preimages, dict):
        return list(preimages.items())
    return list(enumerate(preimages))


def _sq_norm_at_least(diff, bound):
    approx = float(np.dot(diff.astype(np.float64), diff.astype(np.float64)))
    if approx < bound * (1 - 1e-9):
        return False, approx
    exact = int(np.dot(diff.astype(object), diff.astype(object)))
    return exact >= bound, exact


def check_overflow(preimages, cfg, mode=OverflowMode.DISTANCE):
    """
    Verify a field computation will not wrap around, using plaintext preimages.

    Args:
        preimages: Integer numerator vectors q * Q_q(w), either a sequence or
            a mapping from user index to vector
        cfg (QuantConfig): Quantization settings
        mode (OverflowMode): DISTANCE checks q^2 * ||Q(w_j) - Q(w_k)||^2 for
            every pair; AGGREGATE checks |q * sum_j Q(w_j)| per coordinate

    Raises:
        OverflowViolation: Naming the offending pair or coordinate
    """
    mode = OverflowMode(mode)
    half = cfg.field.half
    items = [(label, np.asarray(z, np.int64)) for label, z in _labelled(preimages)]
    if mode is OverflowMode.DISTANCE:
        for (a, za), (b, zb) in combinations(items, 2):
            violated, value = _sq_norm_at_least(za - zb, half)
            if violated:
                raise OverflowViolation(
                    f"pair ({a}, {b}): q^2*||Q(w_j)-Q(w_k)||^2 = {value} >= {half}",
                    offending=(a, b),
                )
        return
    if not items:
        return
    total = np.zeros(len(items[0][1]), dtype=object)
    for _, z in items:
        total = total + z.astype(object)
    magnitudes = np.abs(total)
    worst = int(np.argmax(magnitudes)) if len(total) else 0
    if len(total) and magnitudes[worst] >= half:
        raise OverflowViolation(
            f"coordinate {worst}: |q*sum Q(w_j)| = {magnitudes[worst]} >= {half}",
            offending=worst,
        )
