import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdensecoding import linalg
from qdensecoding.errors import ValidationError

import oracles

H_3_4 = 0.8112781244591328  # H(3/4, 1/4)


class TestEigenvalues:
    def test_identity(self):
        np.testing.assert_allclose(linalg.hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1])

    def test_diagonal_is_sorted_descending(self):
        values = linalg.hermitian_eigenvalues(np.diag([0, 0.5, 0, 0.5]))
        np.testing.assert_allclose(values, [0.5, 0.5, 0, 0], atol=1e-15)

    def test_matches_quartic_oracle(self, rng):
        mats = [oracles.random_hermitian(rng) for _ in range(100)]
        got = linalg.hermitian_eigenvalues(np.stack(mats))
        for a, values in zip(mats, got):
            np.testing.assert_allclose(values, oracles.quartic_eigenvalues(a), atol=1e-9)

    def test_trace_identities_and_charpoly_residual(self, rng):
        for _ in range(100):
            a = oracles.random_hermitian(rng, scale=3.0)
            values = linalg.hermitian_eigenvalues(a)
            assert abs(values.sum() - np.trace(a).real) <= 1e-9
            assert abs((values**2).sum() - np.trace(a @ a).real) <= 1e-9
            norm = np.linalg.norm(a)
            for lam in values:
                assert abs(np.linalg.det(a - lam * np.eye(4))) <= 1e-9 * norm

    def test_eigenvectors_reconstruct(self, rng):
        a = oracles.random_hermitian(rng)
        values, vecs = linalg.hermitian_eigh(a)
        np.testing.assert_allclose(vecs @ np.diag(values) @ vecs.conj().T, a, atol=1e-12)
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-12)

    def test_degenerate_spectrum(self, rng):
        u = oracles.random_unitary(rng)
        a = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ u.conj().T
        a = 0.5 * (a + a.conj().T)
        np.testing.assert_allclose(linalg.hermitian_eigenvalues(a), [2, 2, -1, -1], atol=1e-12)

    def test_stack_shape_preserved(self, rng):
        a = np.stack([[oracles.random_hermitian(rng) for _ in range(3)] for _ in range(2)])
        assert linalg.hermitian_eigenvalues(a).shape == (2, 3, 4)

    def test_non_hermitian_names_asymmetry(self):
        a = np.eye(4, dtype=complex)
        a[0, 1] = 1e-6
        with pytest.raises(ValidationError, match="max asymmetry 1.000e-06"):
            linalg.hermitian_eigenvalues(a)

    def test_wrong_shape(self):
        with pytest.raises(ValidationError):
            linalg.hermitian_eigenvalues(np.eye(3))


class TestEntropy:
    def test_pure_state(self, rng):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        assert linalg.von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0, abs=1e-12)

    def test_maximally_mixed(self):
        assert linalg.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2, abs=1e-12)

    def test_three_quarters(self):
        assert linalg.von_neumann_entropy(np.diag([0.75, 0.25, 0, 0])) == pytest.approx(
            H_3_4, abs=1e-12
        )

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            rho = oracles.random_density(rng, rank=int(rng.integers(1, 5)))
            u = oracles.pauli_embedding_unitary(rng)
            s = linalg.von_neumann_entropy(rho)
            assert 0 <= s <= 2
            assert linalg.von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(s, abs=1e-9)

    def test_roundoff_negatives_clamped(self):
        rho = np.diag([1.0 + 5e-11, -5e-11, 0, 0])
        assert linalg.von_neumann_entropy(rho) == pytest.approx(0, abs=1e-9)

    @pytest.mark.parametrize(
        "rho, match",
        [
            (np.diag([1.2, -0.2, 0, 0]), "negative eigenvalue"),
            (np.diag([0.5, 0.4, 0, 0]), "trace"),
            (np.diag([0.5, 0.5, 0, 1e-9j]), "not Hermitian"),
        ],
    )
    def test_invalid_density(self, rho, match):
        with pytest.raises(ValidationError, match=match):
            linalg.von_neumann_entropy(rho)


class TestShannon:
    @pytest.mark.parametrize(
        "p, expected",
        [((1, 0), 0.0), ((0.5, 0.5), 1.0), ((0.75, 0.75 * 0, 0.25), H_3_4), ((0.25,) * 4, 2.0)],
    )
    def test_values(self, p, expected):
        assert linalg.shannon_entropy(p) == pytest.approx(expected, abs=1e-12)

    def test_bad_sum(self):
        with pytest.raises(ValidationError, match="sum"):
            linalg.shannon_entropy([0.5, 0.4])

    def test_small_negative_clamped(self):
        assert linalg.shannon_entropy([1.0, -1e-13]) == pytest.approx(0.0)

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda xs: sum(xs) > 1e-3))
    def test_bounds(self, xs):
        p = np.array(xs) / sum(xs)
        s = linalg.shannon_entropy(p)
        assert -1e-12 <= s <= np.log2(len(xs)) + 1e-12


class TestFidelity:
    def test_self(self, rng):
        for rank in (1, 2, 4):
            rho = oracles.random_density(rng, rank)
            assert linalg.uhlmann_fidelity(rho, rho) == pytest.approx(1, abs=1e-9)

    def test_orthogonal_pure(self):
        a = np.diag([1.0, 0, 0, 0])
        b = np.diag([0, 0, 1.0, 0])
        assert linalg.uhlmann_fidelity(a, b) == pytest.approx(0, abs=1e-12)

    def test_pure_against_mixture(self, rng):
        for _ in range(50):
            q_mat, _ = np.linalg.qr(rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2)))
            psi, phi = q_mat[:, 0], q_mat[:, 1]
            q = rng.uniform()
            rho = np.outer(psi, psi.conj())
            sigma = q * rho + (1 - q) * np.outer(phi, phi.conj())
            assert linalg.uhlmann_fidelity(rho, sigma) == pytest.approx(q, abs=1e-9)

    def test_pure_reduces_to_overlap(self, rng):
        for _ in range(20):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            v /= np.linalg.norm(v)
            sigma = oracles.random_density(rng)
            expected = np.real(v.conj() @ sigma @ v)
            assert linalg.uhlmann_fidelity(np.outer(v, v.conj()), sigma) == pytest.approx(
                expected, abs=1e-9
            )

    def test_symmetric_and_unitarily_invariant(self, rng):
        for _ in range(30):
            rho = oracles.random_density(rng, int(rng.integers(1, 5)))
            sigma = oracles.random_density(rng, int(rng.integers(1, 5)))
            f = linalg.uhlmann_fidelity(rho, sigma)
            assert 0 <= f <= 1
            assert linalg.uhlmann_fidelity(sigma, rho) == pytest.approx(f, abs=1e-9)
            u = oracles.random_unitary(rng)
            rotated = linalg.uhlmann_fidelity(u @ rho @ u.conj().T, u @ sigma @ u.conj().T)
            assert rotated == pytest.approx(f, abs=1e-9)

    def test_commuting_closed_form(self):
        p = np.array([0.5, 0.3, 0.2, 0.0])
        r = np.array([0.1, 0.1, 0.4, 0.4])
        expected = np.sum(np.sqrt(p * r)) ** 2
        assert linalg.uhlmann_fidelity(np.diag(p), np.diag(r)) == pytest.approx(expected, abs=1e-12)

    def test_broadcasts(self, rng):
        rho = np.stack([oracles.random_density(rng) for _ in range(5)])
        sigma = oracles.random_density(rng)
        out = linalg.uhlmann_fidelity(rho, sigma)
        assert out.shape == (5,)
        assert out[2] == pytest.approx(linalg.uhlmann_fidelity(rho[2], sigma), abs=1e-14)

    def test_rejects_invalid(self):
        with pytest.raises(ValidationError):
            linalg.uhlmann_fidelity(np.diag([2.0, 0, 0, 0]), np.eye(4) / 4)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_identities_property(seed):
    a = oracles.random_hermitian(np.random.default_rng(seed), scale=2.0)
    values = linalg.hermitian_eigenvalues(a)
    assert values.sum() == pytest.approx(np.trace(a).real, abs=1e-9)
    assert (values**2).sum() == pytest.approx(np.trace(a @ a).real, abs=1e-9)
    assert np.all(np.diff(values) <= 0)
