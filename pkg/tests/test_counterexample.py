import numpy as np
import pytest

from discordium.counterexample import (
    COUNTEREXAMPLE_MATRIX,
    run_counterexample,
    zero_conjugate_pair,
    zeroing_report,
)
from discordium.errors import DiagonalForbidden, IndexOutOfRange, NotHermitian
from discordium.linalg import partial_trace


class TestZeroConjugatePair:
    def test_zeroing_an_already_zero_pair_is_identity(self):
        m = np.diag([0.5, 0.5]).astype(complex)
        assert np.array_equal(zero_conjugate_pair(m, 0, 1), m)

    def test_published_positions(self):
        out = zero_conjugate_pair(COUNTEREXAMPLE_MATRIX, 0, 3)
        assert out[0, 3] == 0.0 and out[3, 0] == 0.0
        # Everything else untouched.
        mask = np.ones((4, 4), dtype=bool)
        mask[0, 3] = mask[3, 0] = False
        assert np.array_equal(out[mask], COUNTEREXAMPLE_MATRIX.astype(complex)[mask])

    def test_hermiticity_and_trace_preserved(self):
        out = zero_conjugate_pair(COUNTEREXAMPLE_MATRIX, 0, 3)
        assert np.max(np.abs(out - out.conj().T)) == 0.0
        assert np.isclose(np.trace(out).real, 1.0)

    def test_diagonal_forbidden(self):
        with pytest.raises(DiagonalForbidden):
            zero_conjugate_pair(COUNTEREXAMPLE_MATRIX, 1, 1)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            zero_conjugate_pair(COUNTEREXAMPLE_MATRIX, 0, 4)

    def test_requires_hermitian(self):
        with pytest.raises(NotHermitian):
            zero_conjugate_pair(np.array([[0.0, 1.0], [0.0, 0.0]]), 0, 1)

    @pytest.mark.parametrize("pair", [(0, 3), (1, 2)])
    def test_marginals_unchanged(self, pair):
        # The zeroed entries sit inside off-diagonal blocks and off the block
        # diagonals, so both reductions stay exactly fixed.
        out = zero_conjugate_pair(COUNTEREXAMPLE_MATRIX, *pair)
        for keep in ("A", "B"):
            before = partial_trace(COUNTEREXAMPLE_MATRIX, 2, 2, keep=keep)
            after = partial_trace(out, 2, 2, keep=keep)
            assert np.allclose(before, after, atol=1e-15)


class TestRunCounterexample:
    def test_published_entropies(self):
        first, second = run_counterexample()
        assert abs(first.original_entropy - 1.7555) <= 5e-4
        assert abs(first.modified_entropy - 1.7546) <= 5e-4

    def test_both_zeroings_strictly_decrease_entropy(self):
        first, second = run_counterexample()
        assert first.entropy_delta < 0.0
        assert second.entropy_delta < 0.0
        assert second.modified_entropy < first.original_entropy

    def test_second_report_starts_fresh(self):
        first, second = run_counterexample()
        assert second.zeroed_positions == ((1, 2), (2, 1))
        assert np.allclose(second.original_spectrum, first.original_spectrum)

    def test_report_spectra_consistent(self):
        report = zeroing_report(COUNTEREXAMPLE_MATRIX, 0, 3)
        assert np.isclose(report.original_spectrum.sum(), 1.0)
        assert np.isclose(report.modified_spectrum.sum(), 1.0)
        assert report.zeroed_positions == ((0, 3), (3, 0))
        assert np.isclose(
            report.entropy_delta, report.modified_entropy - report.original_entropy
        )

    def test_to_dict_round_trip(self):
        report = zeroing_report(COUNTEREXAMPLE_MATRIX, 0, 3)
        d = report.to_dict()
        assert d["zeroed_positions"] == [[0, 3], [3, 0]]
        assert d["entropy_delta"] < 0.0
