"""
Reed-Solomon decoding over a prime field with erasures and errors.

Polynomials are galois Polys over the field's GF class. Erasures are
evaluations that never arrived and are simply left out; errors are present
evaluations that disagree with the encoding polynomial. A code of dimension
k = degree_bound + 1 over n present points corrects up to (n - k) // 2
errors; the decoder here is Berlekamp-Welch on the present points.
"""

import logging
from dataclasses import dataclass, field as dataclass_field

import galois
import numpy as np

from .errors import DecodeFailure, DuplicateTheta, RadiusViolated

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evaluation:
    theta: int
    value: int
    present: bool = True


@dataclass(frozen=True)
class EvalSet:
    """Evaluations of one polynomial; absent entries are erasures."""

    entries: tuple

    def __post_init__(self):
        thetas = [e.theta for e in self.entries]
        if len(set(thetas)) != len(thetas):
            raise DuplicateTheta(f"repeated evaluation points in {sorted(thetas)}")

    @classmethod
    def from_values(cls, thetas, values, present=None):
        if present is None:
            present = [True] * len(thetas)
        return cls(
            tuple(
                Evaluation(int(t), int(v), bool(ok))
                for t, v, ok in zip(thetas, values, present)
            )
        )

    def present_points(self):
        return [(e.theta, e.value) for e in self.entries if e.present]


@dataclass(frozen=True)
class DecodedPoly:
    """Decoded polynomial plus the evaluation points found to be in error."""

    poly: galois.Poly
    degree_bound: int
    error_positions: frozenset = dataclass_field(default_factory=frozenset)

    @property
    def coeffs(self):
        """Coefficients as ints, lowest degree first, padded to the bound."""
        size = max(self.degree_bound, self.poly.degree) + 1
        return tuple(int(c) for c in self.poly.coefficients(size, order="asc"))

    def evaluate(self, x):
        return int(self.poly(int(x) % self.poly.field.order))


def _distinct(thetas, field):
    xs = field.vector([int(t) for t in thetas])
    if len(set(xs.tolist())) != len(xs):
        raise DuplicateTheta(f"repeated evaluation points in {sorted(xs.tolist())}")
    return xs


def lagrange_matrix(thetas, targets, field):
    """
    Weights W with P(targets[r]) = sum_i W[r, i] * P(thetas[i]) for every
    polynomial of degree below len(thetas).
    """
    xs = _distinct(thetas, field)
    at = field.vector([int(t) for t in targets])
    k = len(xs)
    diffs = at[:, np.newaxis] - xs[np.newaxis, :]
    num = field.GF.Ones((len(at), k))
    den = field.GF.Ones(k)
    for j in range(k):
        others = np.arange(k) != j
        num[:, others] = num[:, others] * diffs[:, j : j + 1]
        den[others] = den[others] * (xs[others] - xs[j])
    return num / den[np.newaxis, :]


def lagrange_weights(thetas, x, field):
    """Weights w_i with P(x) = sum_i w_i * P(thetas[i])."""
    return lagrange_matrix(thetas, [x], field)[0]


def lagrange_interpolate(points, field, degree_bound=None):
    """
    Interpolate the unique polynomial through a set of points.

    Args:
        points: Sequence of (theta, value) pairs with distinct thetas
        field (PrimeField): Field of the coefficients
        degree_bound (int): Optional bound checked against the result

    Returns:
        DecodedPoly: The interpolant, coefficients padded to len(points)

    Raises:
        DuplicateTheta: If two points share an abscissa
        DecodeFailure: If the interpolant exceeds degree_bound
    """
    xs = _distinct([x for x, _ in points], field)
    ys = field.vector([int(y) for _, y in points])
    poly = galois.lagrange_poly(xs, ys)
    bound = len(points) - 1 if degree_bound is None else degree_bound
    if poly.degree > bound:
        raise DecodeFailure(
            f"interpolant has degree {poly.degree} > {bound}", agreements=len(points)
        )
    return DecodedPoly(poly=poly, degree_bound=bound)


def _disagreements(poly, xs, ys):
    wrong = np.asarray(poly(xs) != ys)
    return frozenset(int(x) for x in xs[wrong])


def _berlekamp_welch(xs, ys, degree_bound, errors, field):
    """Solve Q(x) = y E(x) with E monic of degree `errors`; returns P = Q / E."""
    n_q = degree_bound + errors + 1
    powers = field.vandermonde(xs, max(n_q, errors + 1))
    corrections = -ys[:, np.newaxis] * powers[:, :errors]
    matrix = np.column_stack([np.asarray(powers[:, :n_q]), np.asarray(corrections)])
    solution = field.solve(matrix, ys * powers[:, errors])
    if solution is None:
        return None
    q_poly = galois.Poly(solution[:n_q], field=field.GF, order="asc")
    e_poly = galois.Poly(solution[n_q:] + [1], field=field.GF, order="asc")
    quot, rem = divmod(q_poly, e_poly)
    if rem.nonzero_coeffs.size:
        return None
    return quot


def rs_decode(evals, degree_bound, max_errors, field):
    """
    Decode a Reed-Solomon word with erasures and up to max_errors errors.

    Args:
        evals (EvalSet): Evaluations; absent entries are erasures
        degree_bound (int): Maximum degree of the encoding polynomial
        max_errors (int): Correction radius to use
        field (PrimeField): Coefficient field

    Returns:
        DecodedPoly: The polynomial agreeing with all but at most max_errors
            present entries, with the disagreeing thetas as error_positions

    Raises:
        RadiusViolated: If fewer than degree_bound + 1 + 2 * max_errors
            entries are present
        DecodeFailure: If no such polynomial exists
    """
    points = evals.present_points()
    n = len(points)
    needed = degree_bound + 1 + 2 * max_errors
    if max_errors < 0 or n < needed:
        raise RadiusViolated(
            f"{n} present evaluations, need {needed} for degree {degree_bound} "
            f"and {max_errors} errors"
        )
    xs = field.vector([x for x, _ in points])
    ys = field.vector([y for _, y in points])
    k = degree_bound + 1
    base = galois.lagrange_poly(xs[:k], ys[:k])
    wrong = _disagreements(base, xs, ys)
    if not wrong:
        return DecodedPoly(base, degree_bound)
    if max_errors == 0:
        raise DecodeFailure(
            f"{len(wrong)} evaluations off the interpolant and no error budget",
            agreements=n - len(wrong),
        )
    quot = _berlekamp_welch(xs, ys, degree_bound, max_errors, field)
    if quot is None or quot.degree > degree_bound:
        raise DecodeFailure(
            f"no polynomial of degree <= {degree_bound} within {max_errors} errors",
            agreements=n - len(wrong),
        )
    wrong = _disagreements(quot, xs, ys)
    if len(wrong) > max_errors:
        raise DecodeFailure(
            f"decoded polynomial disagrees with {len(wrong)} > {max_errors} points",
            agreements=n - len(wrong),
        )
    logger.debug("corrected errors at %s", sorted(wrong))
    return DecodedPoly(quot, degree_bound, wrong)


def recover_secret(poly):
    """The secret is the evaluation at zero, i.e. the constant coefficient."""
    return poly.evaluate(0)


@dataclass(frozen=True)
class VectorDecodeResult:
    secrets: np.ndarray
    error_positions: frozenset
    fallback_columns: tuple = ()


def _decode_column(thetas, column, degree_bound, max_errors, field):
    evals = EvalSet.from_values(thetas, column)
    poly = rs_decode(evals, degree_bound, max_errors, field)
    return recover_secret(poly), poly.error_positions


def rs_decode_vectors(thetas, values, degree_bound, max_errors, field, rng):
    """
    Decode many words sharing the same evaluation points and recover each
    polynomial's value at zero.

    Errors are assumed to be per evaluation point (a corrupted reporter taints
    its whole row), so error positions are located once on a random nonzero
    combination of the columns. Every column is then recovered from surviving
    rows and checked against all of them; inconsistent columns are decoded on
    their own.

    Args:
        thetas: Evaluation points of the present rows
        values: (len(thetas), c) array of field residues
        degree_bound (int): Maximum polynomial degree
        max_errors (int): Correction radius
        field (PrimeField): Coefficient field
        rng (np.random.Generator): Source of the combining weights

    Returns:
        VectorDecodeResult: Values at zero for each column, the error
            positions found, and the columns that needed the fallback
    """
    thetas = [int(t) for t in thetas]
    values = field.vector(values)
    if values.ndim != 2 or values.shape[0] != len(thetas):
        raise ValueError(f"expected ({len(thetas)}, c) values, got {values.shape}")
    n, ncols = values.shape
    needed = degree_bound + 1 + 2 * max_errors
    if max_errors < 0 or n < needed:
        raise RadiusViolated(
            f"{n} present evaluations, need {needed} for degree {degree_bound} "
            f"and {max_errors} errors"
        )
    if ncols == 0:
        return VectorDecodeResult(field.zeros(0), frozenset())

    rho = field.random_nonzero(rng, ncols)
    combined = field.combine_columns(values, rho)
    try:
        errors = rs_decode(
            EvalSet.from_values(thetas, combined), degree_bound, max_errors, field
        ).error_positions
    except DecodeFailure:
        logger.debug("combined decode failed, decoding %d columns separately", ncols)
        errors = None

    if errors is None:
        columns = list(range(ncols))
        secrets = field.zeros(ncols)
        found = set()
    else:
        keep = [i for i, t in enumerate(thetas) if t not in errors]
        base, rest = keep[: degree_bound + 1], keep[degree_bound + 1 :]
        weights = lagrange_matrix(
            [thetas[i] for i in base], [0] + [thetas[i] for i in rest], field
        )
        predicted = field.matmul(weights, values[base])
        secrets = predicted[0].copy()
        mismatch = np.asarray(predicted[1:] != values[rest])
        columns = [int(c) for c in np.flatnonzero(mismatch.any(axis=0))]
        found = set(errors)

    for c in columns:
        try:
            secret, col_errors = _decode_column(
                thetas, values[:, c], degree_bound, max_errors, field
            )
        except DecodeFailure as exc:
            exc.column = c
            raise
        secrets[c] = secret
        found |= col_errors
    if columns and errors is not None:
        logger.debug("fallback decoding for %d of %d columns", len(columns), ncols)
    return VectorDecodeResult(secrets, frozenset(found), tuple(columns))
