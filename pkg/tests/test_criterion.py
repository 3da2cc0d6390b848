"""Tests for scaled eigenvectors, pair spectra, and the classification pipeline."""

import numpy as np
import pytest

import sepkit as sk
from sepkit.criterion import (
    Verdict,
    a_value,
    pair_reports,
    pair_spectrum,
    scaled_eigvecs,
    tau_matrix,
)
from sepkit.linalg import singular_values
from sepkit.pairs import pair_operators

# Nonzero entries (1-based) of the three tau matrices of the built-in 2x4
# state in its reference eigenbasis, together with the resulting spectra.
TAU_GOLDEN = [
    ({(2, 4): 0.125, (4, 2): 0.125, (3, 3): -0.25},
     [0.25, 0.125, 0.125, 0.0, 0.0], 3, 0.0),
    ({(2, 5): 0.125, (5, 2): 0.125, (3, 4): -0.125, (4, 3): -0.125},
     [0.125, 0.125, 0.125, 0.125, 0.0], 4, -0.25),
    ({(1, 2): 0.125, (2, 1): 0.125, (3, 5): -0.125, (5, 3): -0.125},
     [0.125, 0.125, 0.125, 0.125, 0.0], 4, -0.25),
]


def test_scaled_eigvecs_reassemble_states():
    """Rows satisfy <x_i|x_j> = t_i delta_ij and sum |x_i><x_i| = rho."""
    for rho in (sk.bell(), sk.bound_2x4(), sk.random_density(3, 3, rank=4, seed=1)):
        x = scaled_eigvecs(rho)
        gram = x.vectors.conj() @ x.vectors.T
        np.testing.assert_allclose(gram, np.diag(np.diag(gram)), atol=1e-12)
        assert np.all(np.diag(gram).real > 0)
        recon = np.einsum("ia,ib->ab", x.vectors, x.vectors.conj())
        np.testing.assert_allclose(recon, rho.matrix, atol=1e-12)


def test_scaled_eigvecs_count_is_rank():
    assert scaled_eigvecs(sk.bell()).count == 1
    assert scaled_eigvecs(sk.bound_2x4()).count == 5
    assert scaled_eigvecs(sk.random_density(2, 2, rank=3, seed=0)).count == 3


def test_scaled_eigvecs_override_accepted():
    x = scaled_eigvecs(sk.bound_2x4(), basis_override=sk.bound_2x4_basis())
    np.testing.assert_array_equal(x.vectors, sk.bound_2x4_basis())


def test_scaled_eigvecs_override_validation():
    rho = sk.bound_2x4()
    good = sk.bound_2x4_basis()
    with pytest.raises(ValueError, match="does not match dimension"):
        scaled_eigvecs(rho, basis_override=good[:, :6])
    with pytest.raises(ValueError, match="not orthogonal"):
        scaled_eigvecs(rho, basis_override=good + 1e-3)
    with pytest.raises(ValueError, match="do not reassemble"):
        scaled_eigvecs(rho, basis_override=np.roll(good, 1, axis=1))


def test_tau_matrices_of_bound_state():
    """Entrywise golden values in the reference gauge, all three pairs."""
    x = scaled_eigvecs(sk.bound_2x4(), basis_override=sk.bound_2x4_basis())
    for b, (entries, lambdas, l_prime, a) in zip(pair_operators(2, 4), TAU_GOLDEN):
        tau = tau_matrix(x, b)
        expected = np.zeros((5, 5), dtype=complex)
        for (i, j), val in entries.items():
            expected[i - 1, j - 1] = val
        np.testing.assert_allclose(tau, expected, atol=1e-14)
        lam, lp = pair_spectrum(tau)
        np.testing.assert_allclose(lam, lambdas, atol=1e-13)
        assert lp == l_prime
        assert a_value(lam, lp) == pytest.approx(a, abs=1e-13)


def test_tau_matrix_is_symmetric():
    for seed in range(4):
        rho = sk.random_density(2, 3, seed=seed)
        x = scaled_eigvecs(rho)
        for b in pair_operators(2, 3):
            tau = tau_matrix(x, b)
            np.testing.assert_allclose(tau, tau.T, atol=1e-13)


def test_pair_spectrum_matches_singular_values():
    rng = np.random.default_rng(12)
    for _ in range(6):
        t = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        tau = (t + t.T) / 2
        lam, l_prime = pair_spectrum(tau)
        np.testing.assert_allclose(lam, singular_values(tau), atol=1e-12)
        assert l_prime == np.sum(lam > 1e-10)


def test_a_value_cases():
    assert a_value(np.array([0.25, 0.125, 0.125, 0.0, 0.0]), 3) == pytest.approx(0.0)
    assert a_value(np.array([0.7, 0.0]), 1) == pytest.approx(0.7)
    assert a_value(np.array([0.5, 0.2, 0.2]), 3) == pytest.approx(0.1)
    assert a_value(np.array([0.0]), 0) == 0.0


def test_pair_spectrum_gauge_invariance():
    """Degenerate eigenspaces leave a gauge freedom in the eigenbasis; the
    pair spectra must not depend on it.  The built-in 2x4 state has a
    triple and a double eigenvalue, so the default gauge and the reference
    gauge differ while every lambda agrees."""
    rho = sk.bound_2x4()
    default = pair_reports(scaled_eigvecs(rho), 2, 4)
    pinned = pair_reports(scaled_eigvecs(rho, basis_override=sk.bound_2x4_basis()), 2, 4)
    for d, p in zip(default, pinned):
        np.testing.assert_allclose(d.lambdas, p.lambdas, atol=1e-10)
        assert d.a_value == pytest.approx(p.a_value, abs=1e-10)


def test_partial_transpose():
    """Transposing either factor preserves trace and hermiticity, and the
    two choices are each other's full transpose."""
    pt = sk.partial_transpose(sk.bell())
    np.testing.assert_allclose(np.linalg.eigvalsh(pt)[0], -0.5, atol=1e-14)
    for seed in range(4):
        rho = sk.random_density(2, 3, seed=seed)
        pt2 = sk.partial_transpose(rho)
        pt1 = sk.partial_transpose(rho, subsystem=1)
        np.testing.assert_allclose(pt2, pt2.conj().T, atol=1e-13)
        assert np.trace(pt2).real == pytest.approx(1.0, abs=1e-13)
        np.testing.assert_allclose(pt1, pt2.T, atol=1e-13)


def test_ppt_min_eigenvalue():
    assert sk.ppt_min_eigenvalue(sk.bell()) == pytest.approx(-0.5, abs=1e-14)
    assert sk.ppt_min_eigenvalue(sk.bound_2x4()) == pytest.approx(0.0, abs=1e-13)
    rng = np.random.default_rng(9)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho_a = a @ a.conj().T
    rho_a /= np.trace(rho_a)
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho_b = b @ b.conj().T
    rho_b /= np.trace(rho_b)
    assert sk.ppt_min_eigenvalue(sk.product(rho_a, rho_b)) >= -1e-12


def test_pure_product_check():
    assert sk.pure_product_check(np.kron([1, 0], [0, 1, 0]), 2, 3)
    assert not sk.pure_product_check(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)
    with pytest.raises(ValueError, match="zero vector"):
        sk.pure_product_check(np.zeros(4), 2, 2)


def test_pair_concurrence_2x2():
    assert sk.pair_concurrence_2x2(sk.bell()) == pytest.approx(1.0, abs=1e-12)
    mixed = sk.density_matrix(2, 2, np.eye(4) / 4)
    assert sk.pair_concurrence_2x2(mixed) == pytest.approx(-0.5, abs=1e-12)
    pure00 = np.zeros((4, 4))
    pure00[0, 0] = 1.0
    assert sk.pair_concurrence_2x2(sk.density_matrix(2, 2, pure00)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="2x2"):
        sk.pair_concurrence_2x2(sk.bound_2x4())


def test_classify_entangled_by_pair_criterion():
    report = sk.classify(sk.bell())
    assert report.verdict is Verdict.ENTANGLED_BY_PAIR_CRITERION
    assert report.entangling_pair == 1
    assert report.pairs[0].a_value == pytest.approx(1.0, abs=1e-12)

    report = sk.classify(sk.werner_2x2(1 / 3 + 1e-3))
    assert report.verdict is Verdict.ENTANGLED_BY_PAIR_CRITERION


def test_classify_entangled_by_ppt():
    """A state whose pair values are all negative but whose partial
    transpose is not: only the second stage can flag it."""
    rho = sk.random_density(2, 3, rank=3, seed=3066)
    report = sk.classify(rho)
    assert report.verdict is Verdict.ENTANGLED_BY_PPT
    assert report.ppt_min_eigenvalue < -1e-6
    assert all(rep.a_value <= 1e-9 for rep in report.pairs)
    assert report.entangling_pair is None


def test_classify_certifies_separable_states():
    """Werner noise below the threshold and pure product states come back
    with a checked decomposition, not just an absence of violations."""
    for rho in (sk.werner_2x2(0.2), sk.werner_2x2(1 / 3 - 1e-3)):
        report = sk.classify(rho)
        assert report.verdict is Verdict.SEPARABLE_CERTIFIED
        err = np.linalg.norm(report.certificate.density() - rho.matrix)
        assert err < 1e-8

    rng = np.random.default_rng(2)
    alpha = rng.normal(size=2) + 1j * rng.normal(size=2)
    beta = rng.normal(size=3) + 1j * rng.normal(size=3)
    rho = sk.product(np.outer(alpha, alpha.conj()) / np.linalg.norm(alpha) ** 2,
                     np.outer(beta, beta.conj()) / np.linalg.norm(beta) ** 2)
    report = sk.classify(rho)
    assert report.verdict is Verdict.SEPARABLE_CERTIFIED
    assert len(report.certificate.weights) == 1
    assert report.search is None


def test_classify_maximally_mixed_2x2():
    report = sk.classify(sk.density_matrix(2, 2, np.eye(4) / 4))
    assert report.verdict is Verdict.SEPARABLE_CERTIFIED
    np.testing.assert_allclose(report.certificate.density(), np.eye(4) / 4, atol=1e-10)


def test_classify_certifies_bound_2x4():
    """The rank-5 2x4 state passes both entanglement tests and the search
    then finds an exact five-member product decomposition."""
    report = sk.classify(sk.bound_2x4())
    assert report.verdict is Verdict.SEPARABLE_CERTIFIED
    assert report.ppt_min_eigenvalue == pytest.approx(0.0, abs=1e-13)
    assert report.search is not None
    assert report.search.best_residual < 1e-20
    err = np.linalg.norm(report.certificate.density() - sk.bound_2x4().matrix)
    assert err < 1e-8
