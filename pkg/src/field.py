"""
Prime field and commitment group arithmetic.

Field vectors are galois FieldArrays over GF(p). galois stores residues of
moduli above roughly 2**31.5 as Python ints, so the bulk kernels (matrix
products, row sums and pairwise distances) run on uint64 residues whenever
p < 2**32 and the products of two residues still fit in 64 bits.
"""

import logging
from dataclasses import dataclass

import galois
import numpy as np
from sympy import isprime

from .errors import LengthMismatch, NoGroupFound, NotPrime, ZeroInverse

logger = logging.getLogger(__name__)

# Largest prime below 2**32.
DEFAULT_PRIME = 2**32 - 5
# Small field used for exhaustive checks.
TEST_PRIME = 257

_UINT64_LIMIT = 2**32


class PrimeField:
    """The prime field F_p: a galois field class plus the protocol's kernels."""

    def __init__(self, p=DEFAULT_PRIME):
        """
        Create the field of integers modulo a prime.

        Args:
            p (int): Prime modulus, at most 64 bits

        Raises:
            NotPrime: If p is not a prime or is wider than 64 bits
        """
        p = int(p)
        if p < 2 or not isprime(p):
            raise NotPrime(f"field modulus {p} is not prime")
        if p.bit_length() > 64:
            raise NotPrime(f"field modulus {p} is wider than 64 bits")
        self.p = p
        self.half = (p - 1) // 2
        self.GF = galois.GF(p)
        self._object = np.object_ in self.GF.dtypes
        self._native = self._object and p < _UINT64_LIMIT
        self._p = np.uint64(p)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    # Scalars

    def _el(self, value):
        return self.GF(int(value) % self.p)

    def add(self, a, b):
        return int(self._el(a) + self._el(b))

    def sub(self, a, b):
        return int(self._el(a) - self._el(b))

    def mul(self, a, b):
        return int(self._el(a) * self._el(b))

    def pow(self, a, e):
        """Exponentiation for a non-negative exponent."""
        if e < 0:
            raise ValueError("exponent must be non-negative")
        return int(self._el(a) ** int(e))

    def inv(self, a):
        """Multiplicative inverse, raising ZeroInverse for zero."""
        a = self._el(a)
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return int(np.reciprocal(a))

    # Vectors

    def _lift(self, residues):
        """Wrap an integer array of canonical residues as a FieldArray."""
        residues = np.asarray(residues)
        if residues.size == 0:
            return self.GF.Zeros(residues.shape)
        if self._object:
            return self.GF(residues.tolist())
        return self.GF(residues.astype(self.GF.dtypes[-1]))

    def _residues(self, arr):
        return np.asarray(arr).astype(np.uint64)

    def vector(self, values):
        """Build a field vector (or matrix) from any integer array."""
        if isinstance(values, self.GF):
            return values
        arr = np.asarray(values)
        if arr.dtype == object or self.p >= 2**63:
            reduced = np.asarray([int(v) % self.p for v in arr.ravel()], dtype=object)
            return self._lift(reduced.reshape(arr.shape))
        if arr.dtype.kind == "u":
            return self._lift(arr.astype(np.uint64) % self._p)
        return self._lift(np.mod(arr.astype(np.int64), self.p))

    def zeros(self, shape):
        return self.GF.Zeros(shape)

    def random_vector(self, rng, size):
        """Draw residues uniformly from [0, p)."""
        return self.GF.Random(size, seed=rng)

    def random_nonzero(self, rng, size):
        """Draw residues uniformly from [1, p)."""
        return self.GF.Random(size, low=1, seed=rng)

    def stack(self, rows):
        """Stack equal-length field vectors into a matrix."""
        return self.GF(np.stack([np.asarray(row) for row in rows]))

    def vandermonde(self, points, ncols):
        """Matrix of powers points[i] ** c for c < ncols."""
        xs = self.vector(points)
        powers = [self.GF.Ones(len(xs))]
        while len(powers) < ncols:
            powers.append(powers[-1] * xs)
        return self.stack(powers[:ncols]).T

    def matmul(self, a, b):
        """Matrix product of two 2-D field arrays."""
        if not self._native:
            return self.vector(a) @ self.vector(b)
        a, b = self._residues(a), self._residues(b)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
        for t in range(a.shape[1]):
            out = (out + (a[:, t : t + 1] * b[t]) % self._p) % self._p
        return self._lift(out)

    def lincomb(self, coeffs, rows):
        """
        Compute sum_i coeffs[i] * rows[i].

        Args:
            coeffs: Scalars, one per row
            rows: Field vectors (or a 2-D array) of equal length

        Returns:
            FieldArray: The combined vector
        """
        rows = list(rows)
        if len(rows) != len(coeffs):
            raise LengthMismatch(f"{len(coeffs)} coefficients for {len(rows)} rows")
        if not rows:
            return self.zeros(0)
        weights = self.vector(np.asarray(coeffs, dtype=object))[np.newaxis, :]
        return self.matmul(weights, self.stack(rows))[0]

    def combine_columns(self, matrix, weights):
        """Per row, sum_c weights[c] * matrix[row, c]."""
        column = self.vector(np.asarray(weights, dtype=object))[:, np.newaxis]
        return self.matmul(matrix, column)[:, 0]

    def vsum(self, rows):
        """Sum a sequence of field vectors."""
        rows = list(rows)
        if not rows:
            raise ValueError("cannot sum an empty set of vectors")
        if self._native:
            total = np.stack([self._residues(row) for row in rows]).sum(axis=0)
            return self._lift(total % self._p)
        acc = rows[0].copy()
        for row in rows[1:]:
            acc = acc + row
        return acc

    def sq_dist(self, u, v):
        """Squared Euclidean distance sum_k (u_k - v_k)^2 computed in F_p."""
        if len(u) != len(v):
            raise LengthMismatch(f"vectors of length {len(u)} and {len(v)}")
        diff = self.vector(u) - self.vector(v)
        return int((diff * diff).sum())

    def pairwise_sq_dists(self, rows):
        """
        Squared distances between every pair of rows of a 2-D field array.

        Returns:
            FieldArray: Symmetric (n, n) matrix
        """
        rows = self.vector(rows)
        n = rows.shape[0]
        if self._native:
            rows = self._residues(rows)
            out = np.zeros((n, n), dtype=np.uint64)
            for j in range(n - 1):
                diff = (rows[j + 1 :] + (self._p - rows[j])) % self._p
                dists = ((diff * diff) % self._p).sum(axis=1) % self._p
                out[j, j + 1 :] = dists
                out[j + 1 :, j] = dists
            return self._lift(out)
        out = self.zeros((n, n))
        for j in range(n - 1):
            diff = rows[j + 1 :] - rows[j]
            dists = (diff * diff).sum(axis=1)
            out[j, j + 1 :] = dists
            out[j + 1 :, j] = dists
        return out

    # Linear algebra

    def solve(self, matrix, rhs):
        """
        Solve matrix @ x = rhs over F_p from the reduced row echelon form.

        Free variables are set to zero. Returns None when the system is
        inconsistent.
        """
        matrix = self.vector(np.asarray(matrix, dtype=object))
        if matrix.shape[0] == 0:
            return []
        ncols = matrix.shape[1]
        rhs = self.vector(np.asarray(rhs, dtype=object))
        augmented = np.column_stack([np.asarray(matrix), np.asarray(rhs)])
        rref = self.GF(augmented).row_reduce(ncols=ncols)
        pivots = np.asarray(rref[:, :ncols]) != 0
        consts = [int(c) for c in rref[:, ncols]]
        x = [0] * ncols
        for row, const in zip(pivots, consts):
            cols = np.flatnonzero(row)
            if cols.size:
                x[int(cols[0])] = const
            elif const:
                return None
        return x


@dataclass(frozen=True)
class CommitGroup:
    """
    Order-p subgroup of Z_lam^*, generated by psi.

    Group elements are ints in [1, lam). Exponents live in F_p, so
    psi^a * psi^b == psi^((a + b) mod p).
    """

    lam: int
    psi: int
    order: int

    def __post_init__(self):
        if not isprime(self.lam):
            raise NotPrime(f"group modulus {self.lam} is not prime")
        if (self.lam - 1) % self.order:
            raise ValueError(f"{self.order} does not divide {self.lam} - 1")
        if self.psi == 1 or pow(self.psi, self.order, self.lam) != 1:
            raise ValueError(
                f"{self.psi} does not generate an order-{self.order} subgroup"
            )

    @property
    def dtype(self):
        return np.int64 if self.lam < 2**62 else object

    def exp(self, exponents):
        """Elementwise psi^e mod lam over a vector of exponents."""
        flat = np.asarray(exponents).ravel()
        out = np.fromiter(
            (pow(self.psi, int(e), self.lam) for e in flat),
            dtype=self.dtype,
            count=len(flat),
        )
        return out.reshape(np.shape(exponents))

    def multi_exp(self, bases, exponents):
        """Return prod_i bases[i]^exponents[i] mod lam."""
        acc = 1
        for b, e in zip(bases, exponents):
            acc = (acc * pow(int(b), int(e) % self.order, self.lam)) % self.lam
        return acc


def find_commit_group(field, search_limit=100_000):
    """
    Find the smallest prime lam = k*p + 1 (k >= 2) and a generator of its
    order-p subgroup.

    Args:
        field (PrimeField): Field whose modulus is the subgroup order
        search_limit (int): Largest multiplier k tried

    Returns:
        CommitGroup: Group with psi = h^((lam-1)/p) for the smallest h >= 2
            giving psi != 1

    Raises:
        NoGroupFound: If no prime lam exists for k <= search_limit
    """
    p = field.p
    for k in range(2, search_limit + 1):
        lam = k * p + 1
        if not isprime(lam):
            continue
        cofactor = (lam - 1) // p
        for h in range(2, lam):
            psi = pow(h, cofactor, lam)
            if psi != 1:
                logger.debug("commitment group for p=%d: lam=%d psi=%d", p, lam, psi)
                return CommitGroup(lam=lam, psi=psi, order=p)
    raise NoGroupFound(f"no prime k*{p}+1 with 2 <= k <= {search_limit}")
