"""
Unit tests for Reed-Solomon decoding with erasures and errors.
"""

from itertools import product

import galois
import numpy as np
import pytest

from errors import DecodeFailure, DuplicateTheta, RadiusViolated
from rscode import (
    DecodedPoly,
    EvalSet,
    lagrange_interpolate,
    lagrange_weights,
    recover_secret,
    rs_decode,
    rs_decode_vectors,
)


def _random_word(field, rng, degree, n):
    coeffs = [int(c) for c in field.random_vector(rng, degree + 1)]
    poly = galois.Poly(coeffs, field=field.GF, order="asc")
    values = [int(v) for v in poly(field.vector(range(1, n + 1)))]
    return coeffs, values


def _damage(field, rng, values, n, erasures, errors):
    """Erase and corrupt random disjoint positions of a word in place."""
    order = rng.permutation(n)
    erased = set(order[:erasures].tolist())
    corrupted = order[erasures : erasures + errors].tolist()
    for idx in corrupted:
        shift = int(field.random_nonzero(rng, 1)[0])
        values[idx] = (values[idx] + shift) % field.p
    present = [i not in erased for i in range(n)]
    return present, corrupted


class TestInterpolation:
    """Test cases for Lagrange interpolation."""

    def test_line_example(self, test_field):
        """Test the line through (1, 7) and (2, 9)."""
        poly = lagrange_interpolate([(1, 7), (2, 9)], test_field)
        assert poly.coeffs == (5, 2)

    def test_single_point_is_constant(self, test_field):
        """Test a degree-0 interpolation."""
        assert lagrange_interpolate([(4, 77)], test_field).coeffs == (77,)

    def test_reproduces_inputs(self, prod_field, rng):
        """Test that re-evaluation at every abscissa returns the inputs."""
        values = prod_field.random_vector(rng, 6)
        points = [(t, int(v)) for t, v in zip(range(1, 7), values)]
        poly = lagrange_interpolate(points, prod_field)
        for x, y in points:
            assert poly.evaluate(x) == y

    def test_degree_bound_checked(self, test_field):
        """Test DecodeFailure when the interpolant is too high a degree."""
        with pytest.raises(DecodeFailure):
            lagrange_interpolate([(1, 0), (2, 1), (3, 0)], test_field, degree_bound=1)

    def test_duplicate_theta(self, test_field):
        """Test that repeated abscissae are refused."""
        with pytest.raises(DuplicateTheta):
            lagrange_interpolate([(1, 3), (1, 4)], test_field)
        with pytest.raises(DuplicateTheta):
            EvalSet.from_values([2, 2], [0, 0])


class TestRsDecode:
    """Test cases for scalar Reed-Solomon decoding."""

    def test_single_error_example(self, test_field):
        """Test correction of theta=3 corrupted to 99 on the line 5 + 2*theta."""
        evals = EvalSet.from_values([1, 2, 3, 4, 5], [7, 9, 99, 13, 15])
        poly = rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        assert poly.coeffs == (5, 2)
        assert poly.error_positions == frozenset({3})
        assert recover_secret(poly) == 5

    def test_error_in_interpolation_base(self, test_field):
        """Test correction when the first points themselves are corrupted."""
        evals = EvalSet.from_values([1, 2, 3, 4, 5], [8, 9, 11, 13, 15])
        poly = rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        assert poly.coeffs == (5, 2)
        assert poly.error_positions == frozenset({1})

    def test_no_errors_matches_interpolation(self, test_field):
        """Test that clean words decode to the interpolant."""
        evals = EvalSet.from_values([1, 2, 3, 4], [7, 9, 11, 13])
        poly = rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        assert poly.coeffs == lagrange_interpolate([(1, 7), (2, 9)], test_field).coeffs
        assert poly.error_positions == frozenset()

    def test_erasures_are_skipped(self, test_field):
        """Test that absent entries do not count as errors."""
        evals = EvalSet.from_values(
            [1, 2, 3, 4, 5, 6],
            [7, 0, 11, 99, 15, 17],
            [True, False, True, True, True, True],
        )
        poly = rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        assert poly.coeffs == (5, 2)
        assert poly.error_positions == frozenset({4})

    def test_too_many_errors_fails_loudly(self, test_field):
        """Test that two errors with a radius of one never decode silently."""
        evals = EvalSet.from_values([1, 2, 3, 4, 5], [7, 50, 11, 60, 15])
        with pytest.raises(DecodeFailure) as excinfo:
            rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        assert excinfo.value.agreements is not None

    def test_error_without_budget(self, test_field):
        """Test that a corruption with max_errors=0 is a DecodeFailure."""
        evals = EvalSet.from_values([1, 2, 3], [7, 9, 12])
        with pytest.raises(DecodeFailure):
            rs_decode(evals, degree_bound=1, max_errors=0, field=test_field)

    def test_radius_violated(self, test_field):
        """Test the precondition on the number of present entries."""
        evals = EvalSet.from_values([1, 2, 3], [7, 9, 11])
        with pytest.raises(RadiusViolated):
            rs_decode(evals, degree_bound=1, max_errors=1, field=test_field)
        with pytest.raises(RadiusViolated):
            rs_decode(evals, degree_bound=1, max_errors=-1, field=test_field)

    @pytest.mark.parametrize("prime_fixture", ["test_field", "prod_field"])
    def test_random_words_within_radius(self, prime_fixture, request, rng):
        """Test exact recovery for random erasure and error patterns."""
        field = request.getfixturevalue(prime_fixture)
        n = 11
        for _ in range(150):
            degree = int(rng.integers(0, 5))
            coeffs, values = _random_word(field, rng, degree, n)
            budget = n - degree - 1
            erasures = int(rng.integers(0, budget + 1))
            errors = int(rng.integers(0, (budget - erasures) // 2 + 1))
            present, corrupted = _damage(field, rng, values, n, erasures, errors)
            evals = EvalSet.from_values(range(1, n + 1), values, present)
            radius = (n - erasures - degree - 1) // 2
            poly = rs_decode(evals, degree, radius, field)
            assert list(poly.coeffs) == coeffs
            assert poly.error_positions == frozenset(i + 1 for i in corrupted)


class TestDecodingRadius:
    """Test cases pinning the decoder to its radius n - a >= degree + 1 + 2e."""

    def test_every_parameter_triple_small_field(self, test_field, rng):
        """Test every (degree, errors, erasures) for up to ten points at p=257."""
        checked = 0
        for n in range(1, 11):
            for degree, errors, erasures in product(range(n), range(n), range(n)):
                if n - erasures < degree + 1 + 2 * errors:
                    continue
                coeffs, values = _random_word(test_field, rng, degree, n)
                present, corrupted = _damage(
                    test_field, rng, values, n, erasures, errors
                )
                evals = EvalSet.from_values(range(1, n + 1), values, present)
                poly = rs_decode(evals, degree, errors, test_field)
                assert list(poly.coeffs) == coeffs
                assert poly.error_positions == frozenset(i + 1 for i in corrupted)
                checked += 1
        assert checked > 300

    def test_one_present_point_short_is_refused(self, test_field, rng):
        """Test RadiusViolated whenever a triple needs one more present point."""
        for n in range(2, 11):
            for degree, errors in product(range(n), range(n)):
                erasures = n - (degree + 2 * errors)
                if not 0 <= erasures < n:
                    continue
                _, values = _random_word(test_field, rng, degree, n)
                present, _ = _damage(test_field, rng, values, n, erasures, 0)
                evals = EvalSet.from_values(range(1, n + 1), values, present)
                with pytest.raises(RadiusViolated):
                    rs_decode(evals, degree, errors, test_field)

    def test_errors_beyond_radius_never_return_the_codeword(self, test_field, rng):
        """Test that radius + 1 errors fail or decode to a different polynomial."""
        for _ in range(200):
            degree = int(rng.integers(0, 3))
            n = degree + 1 + 2 * 2
            coeffs, values = _random_word(test_field, rng, degree, n)
            present, corrupted = _damage(test_field, rng, values, n, 0, 3)
            evals = EvalSet.from_values(range(1, n + 1), values, present)
            try:
                poly = rs_decode(evals, degree, 2, test_field)
            except DecodeFailure:
                continue
            assert list(poly.coeffs) != coeffs
            assert len(poly.error_positions) <= 2

    @pytest.mark.slow
    def test_fuzz_production_field(self, prod_field, rng):
        """Test 10^4 random words at the radius over the 32-bit field."""
        for _ in range(10_000):
            n = int(rng.integers(1, 13))
            degree = int(rng.integers(0, n))
            budget = n - degree - 1
            erasures = int(rng.integers(0, budget + 1))
            errors = (budget - erasures) // 2
            coeffs, values = _random_word(prod_field, rng, degree, n)
            present, corrupted = _damage(prod_field, rng, values, n, erasures, errors)
            evals = EvalSet.from_values(range(1, n + 1), values, present)
            poly = rs_decode(evals, degree, errors, prod_field)
            assert list(poly.coeffs) == coeffs
            assert recover_secret(poly) == coeffs[0]
            assert poly.error_positions == frozenset(i + 1 for i in corrupted)


class TestRecoverSecret:
    """Test cases for reading the secret off a decoded polynomial."""

    def test_examples(self, test_field):
        """Test the constant coefficient and the zero polynomial."""
        line = galois.Poly([5, 2], field=test_field.GF, order="asc")
        assert recover_secret(DecodedPoly(line, 1)) == 5
        zero = DecodedPoly(galois.Poly.Zero(test_field.GF), 1)
        assert recover_secret(zero) == 0
        assert zero.coeffs == (0, 0)

    def test_lagrange_weights_recover_secret(self, prod_field, rng):
        """Test that weights at zero reproduce the constant coefficient."""
        coeffs, values = _random_word(prod_field, rng, 3, 4)
        weights = lagrange_weights([1, 2, 3, 4], 0, prod_field)
        assert int((weights * prod_field.vector(values)).sum()) == coeffs[0]


class TestVectorDecode:
    """Test cases for decoding many words at shared points."""

    def _shares(self, field, rng, degree, n, d):
        coeffs = field.random_vector(rng, (degree + 1, d))
        powers = field.vandermonde(range(1, n + 1), degree + 1)
        return field.matmul(powers, coeffs), coeffs[0]

    def test_whole_row_corruption(self, prod_field, rng):
        """Test recovery when one reporter corrupts every coordinate."""
        values, secrets = self._shares(prod_field, rng, 2, 8, 5)
        values[3] = values[3] + prod_field.random_nonzero(rng, 5)
        result = rs_decode_vectors(range(1, 9), values, 2, 2, prod_field, rng)
        assert np.array_equal(result.secrets, secrets)
        assert result.error_positions == frozenset({4})
        assert result.fallback_columns == ()

    def test_single_coordinate_corruption(self, test_field, rng):
        """Test recovery when a reporter corrupts one coordinate only."""
        values, secrets = self._shares(test_field, rng, 1, 7, 4)
        values[0, 2] = test_field.add(int(values[0, 2]), 1)
        result = rs_decode_vectors(range(1, 8), values, 1, 2, test_field, rng)
        assert np.array_equal(result.secrets, secrets)
        assert 1 in result.error_positions

    def test_matches_scalar_decoding(self, test_field, rng):
        """Test agreement with independent per-coordinate decodes."""
        values, _ = self._shares(test_field, rng, 2, 9, 6)
        values[5] = values[5] + test_field.random_nonzero(rng, 6)
        values[7, 1] = test_field.add(int(values[7, 1]), 3)
        result = rs_decode_vectors(range(1, 10), values, 2, 3, test_field, rng)
        for k in range(6):
            evals = EvalSet.from_values(range(1, 10), values[:, k])
            poly = rs_decode(evals, 2, 3, test_field)
            assert int(result.secrets[k]) == recover_secret(poly)

    def test_shape_and_radius_checks(self, test_field, rng):
        """Test malformed input and too few rows."""
        with pytest.raises(ValueError):
            rs_decode_vectors([1, 2], test_field.zeros(3), 0, 0, test_field, rng)
        with pytest.raises(RadiusViolated):
            values = test_field.zeros((3, 2))
            rs_decode_vectors([1, 2, 3], values, 1, 1, test_field, rng)

    def test_empty_columns(self, test_field, rng):
        """Test that zero columns decode to an empty vector."""
        values = test_field.zeros((3, 0))
        result = rs_decode_vectors([1, 2, 3], values, 1, 0, test_field, rng)
        assert len(result.secrets) == 0
