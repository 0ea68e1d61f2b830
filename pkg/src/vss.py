"""
Feldman verifiable secret sharing of quantized models.

A dealer hides its field vector as the constant term of a random degree-T
vector polynomial, hands f(theta_j) to user j and broadcasts coordinatewise
commitments psi^coefficient in the order-p group. Receivers check their share
against the commitments through the exponent homomorphism.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, DuplicatePoints
from .rscode import lagrange_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalPoints:
    """Distinct nonzero evaluation points, theta of user i is thetas[i - 1]."""

    thetas: tuple

    def __post_init__(self):
        if len(set(self.thetas)) != len(self.thetas):
            raise DuplicatePoints(f"evaluation points repeat: {self.thetas}")
        if any(t == 0 for t in self.thetas):
            raise BadParams("0 is reserved for the secret and cannot be a point")

    @classmethod
    def consecutive(cls, n, field):
        """theta_i = i for users 1..n."""
        if n >= field.p:
            raise BadParams(
                f"{n} users need {n} distinct nonzero points, p = {field.p}"
            )
        return cls(tuple(range(1, n + 1)))

    def __len__(self):
        return len(self.thetas)

    def theta(self, user):
        return self.thetas[user - 1]

    @property
    def users(self):
        return range(1, len(self.thetas) + 1)


@dataclass(frozen=True)
class SharePolynomial:
    """f(theta) = const_term + sum_k rand_coeffs[k-1] * theta^k."""

    const_term: np.ndarray
    rand_coeffs: tuple

    @property
    def degree(self):
        return len(self.rand_coeffs)

    @property
    def coefficients(self):
        return (self.const_term,) + tuple(self.rand_coeffs)

    def evaluate_many(self, thetas, field):
        """Shares at every point: the Vandermonde matrix times the coefficients."""
        powers = field.vandermonde(thetas, self.degree + 1)
        return field.matmul(powers, field.stack(self.coefficients))

    def evaluate(self, theta, field):
        return self.evaluate_many([theta], field)[0]


@dataclass(frozen=True)
class Share:
    from_user: int
    to_user: int
    value: np.ndarray


@dataclass(frozen=True)
class CommitmentVector:
    """Commitments of one dealer: commits[k] = psi^(coefficient k), elementwise."""

    from_user: int
    commits: tuple

    @property
    def dim(self):
        return len(self.commits[0]) if self.commits else 0


def gen_shares(secret, T, points, rng, field, dealer=0):
    """
    Split a field vector into Shamir shares, one per evaluation point.

    Args:
        secret: QuantizedModel or field vector to hide
        T (int): Polynomial degree (collusion threshold)
        points (EvalPoints): Evaluation points of the receivers
        rng (np.random.Generator): Source of the random coefficients
        field (PrimeField): Share field
        dealer (int): Index recorded as the sender of every share

    Returns:
        tuple: (SharePolynomial, list of Share for users 1..N)

    Raises:
        BadParams: If T < 0 or T >= N
    """
    vec = getattr(secret, "vec", secret)
    if T < 0 or T >= len(points):
        raise BadParams(f"degree T={T} needs 0 <= T < N={len(points)}")
    d = len(vec)
    rand = tuple(field.random_vector(rng, d) for _ in range(T))
    poly = SharePolynomial(const_term=field.vector(vec), rand_coeffs=rand)
    values = poly.evaluate_many(points.thetas, field)
    shares = [
        Share(from_user=dealer, to_user=j, value=values[j - 1]) for j in points.users
    ]
    return poly, shares


def gen_commitments(poly, grp, dealer=0):
    """Commit to every coefficient vector: psi^coeff mod lam, elementwise."""
    return CommitmentVector(
        from_user=dealer,
        commits=tuple(grp.exp(coeff) for coeff in poly.coefficients),
    )


def verify_share(share, commits, theta, grp):
    """
    Check psi^share == prod_k commits[k]^(theta^k) on every coordinate.

    Returns:
        bool: True when every coordinate satisfies the equality
    """
    if not commits.commits or len(share.value) != commits.dim:
        return False
    exponents = [pow(int(theta), k, grp.order) for k in range(len(commits.commits))]
    lhs = grp.exp(share.value)
    for coord in range(commits.dim):
        bases = [c[coord] for c in commits.commits]
        if grp.multi_exp(bases, exponents) != int(lhs[coord]):
            return False
    return True


def fold_share(share, weights, field):
    """Collapse a share to one coordinate: sum_l weights[l] * share[l]."""
    folded = field.combine_columns(np.asarray(share.value)[np.newaxis, :], weights)
    return Share(share.from_user, share.to_user, folded)


def fold_commitments(commits, weights, grp):
    """
    Collapse commitments the same way fold_share collapses shares.

    prod_l (psi^a_l)^(w_l) = psi^(sum_l w_l a_l), so a folded share verifies
    against folded commitments whenever the original did, and a share that
    differs in any single coordinate fails whenever that weight is nonzero.
    """
    return CommitmentVector(
        from_user=commits.from_user,
        commits=tuple(
            np.asarray([grp.multi_exp(c, weights)], dtype=grp.dtype)
            for c in commits.commits
        ),
    )


def interpolate_secret(shares, points, field):
    """Recover the shared vector from shares at distinct points."""
    thetas = [points.theta(s.to_user) for s in shares]
    if len(set(thetas)) != len(thetas):
        raise DuplicatePoints(f"shares at repeated points {thetas}")
    weights = lagrange_weights(thetas, 0, field)
    return field.lincomb(weights, [s.value for s in shares])


def privacy_consistency_count(observed, candidate_secret, T, points, field):
    """
    Count degree-<=T vector polynomials through the observed shares that
    take the value candidate_secret at zero.

    The count is p^(T + 1 - rank) per coordinate when the interpolation
    system is consistent and 0 otherwise. With exactly T shares it is 1 for
    every candidate, so the shares carry no information about the secret.

    Raises:
        DuplicatePoints: If two shares sit at the same point
    """
    thetas = [points.theta(s.to_user) for s in observed]
    if len(set(thetas)) != len(thetas):
        raise DuplicatePoints(f"shares at repeated points {thetas}")
    candidate = field.vector(candidate_secret)
    system = field.vandermonde([0] + thetas, T + 1)
    free = T + 1 - int(np.linalg.matrix_rank(system))
    count = 1
    for coord in range(len(candidate)):
        rhs = [int(candidate[coord])] + [int(s.value[coord]) for s in observed]
        if field.solve(system, rhs) is None:
            return 0
        count *= field.p**free
    return count
