import math

import numpy as np
import pytest

from qdecay import matcore
from qdecay.matcore import BipartiteDensity, DensityMatrix
from qdecay.rng import Rng


def test_eigh_identity():
    w, v = matcore.eigh(np.eye(3, dtype=complex))
    assert np.allclose(w, [1, 1, 1])


def test_eigh_pauli_z():
    w, _ = matcore.eigh(np.diag([1.0, -1.0]).astype(complex))
    assert np.allclose(w, [-1, 1])


def test_eigh_reconstruction_random_4x4(rng):
    for _ in range(100):
        h = matcore.random_hermitian(rng, 4)
        w, v = matcore.eigh(h)
        recon = (v * w) @ v.conj().T
        assert np.abs(recon - h).max() < 1e-10
        assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-10
        assert np.all(np.diff(w) >= 0)


@pytest.mark.parametrize("d", [2, 3, 4, 8, 16])
def test_eigh_batch_reconstruction(d, rng):
    n = 250
    stack = np.stack([matcore.random_hermitian(rng, d) for _ in range(n)])
    w, v = matcore.jacobi_eigh_batch(stack)
    recon = v @ (w[:, :, None] * np.conj(np.transpose(v, (0, 2, 1))))
    scale = max(1.0, float(np.abs(stack).max()))
    assert np.abs(recon - stack).max() < 1e-10 * scale
    ref = np.linalg.eigvalsh(stack)
    assert np.abs(w - ref).max() < 1e-9 * scale


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        matcore.eigh(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_matrix_function_exp_of_zero():
    out = matcore.matrix_function(np.zeros((3, 3), dtype=complex), np.exp)
    assert np.abs(out - np.eye(3)).max() < 1e-14


def test_matrix_function_log_diagonal():
    out = matcore.matrix_function(np.diag([1.0, math.e]).astype(complex), np.log,
                                  domain=lambda w: w > 0, name="log")
    assert np.abs(out - np.diag([0.0, 1.0])).max() < 1e-12


def test_matrix_function_roundtrip_exp_log(rng):
    rho = matcore.random_density(rng, 3, mix=0.2)
    logr = matcore.matrix_function(rho.matrix, np.log, domain=lambda w: w > 0, name="log")
    back = matcore.matrix_function(logr, np.exp)
    assert np.abs(back - rho.matrix).max() < 1e-10


def test_matrix_function_domain_error():
    with pytest.raises(ValueError, match="log is undefined at eigenvalue"):
        matcore.matrix_function(np.diag([1.0, -2.0]).astype(complex), np.log,
                                domain=lambda w: w > 0, name="log")


def test_tensor_identity_matrices():
    assert np.array_equal(matcore.tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_trace_multiplicative(rng):
    a = matcore.random_hermitian(rng, 2)
    b = matcore.random_hermitian(rng, 3)
    lhs = np.trace(matcore.tensor(a, b))
    assert abs(lhs - np.trace(a) * np.trace(b)) < 1e-12


def test_tensor_basis_projectors():
    e00 = np.zeros((2, 2)); e00[0, 0] = 1
    e11 = np.zeros((2, 2)); e11[1, 1] = 1
    out = matcore.tensor(e00, e11)
    expect = np.zeros((4, 4)); expect[1, 1] = 1
    assert np.array_equal(out, expect)


def test_partial_trace_product_states(rng):
    ra = matcore.random_density(rng, 2)
    rb = matcore.random_density(rng, 3)
    joint = matcore.tensor(ra.matrix, rb.matrix)
    assert np.abs(matcore.partial_trace(joint, 2, 3, "A") - ra.matrix).max() < 1e-12
    assert np.abs(matcore.partial_trace(joint, 2, 3, "B") - rb.matrix).max() < 1e-12


def test_partial_trace_bell_pair():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / math.sqrt(2)
    rho = np.outer(bell, bell.conj())
    red = matcore.partial_trace(rho, 2, 2, "A")
    assert np.abs(red - np.eye(2) / 2).max() < 1e-12


def test_partial_trace_preserves_trace_and_positivity(rng):
    for _ in range(200):
        rho = matcore.random_density(rng, 6)
        bip = BipartiteDensity(2, 3, rho)
        for keep in ("A", "B"):
            red = bip.marginal(keep)
            assert abs(np.trace(red.matrix).real - 1) < 1e-10
            assert red.eigenvalues[0] >= 0


def test_trace_norm_examples(rng):
    rho = matcore.random_density(rng, 3)
    assert matcore.trace_norm(rho.matrix - rho.matrix) == 0
    e0 = DensityMatrix.pure([1, 0]).matrix
    e1 = DensityMatrix.pure([0, 1]).matrix
    assert abs(matcore.trace_norm(e0 - e1) - 2) < 1e-12
    plus = DensityMatrix.pure([1, 1]).matrix
    assert abs(matcore.trace_norm(plus - np.eye(2) / 2) - 1) < 1e-12


def test_loewner_same_state(rng):
    rho = matcore.random_density(rng, 3, mix=0.1)
    assert abs(matcore.loewner_min_coefficient(rho, rho) - 1) < 1e-9


def test_loewner_pure_vs_mixed():
    pure = DensityMatrix.pure([1, 0])
    mixed = DensityMatrix.maximally_mixed(2)
    assert abs(matcore.loewner_min_coefficient(pure, mixed) - 2) < 1e-10


def test_loewner_commuting_diagonal_ratio(rng):
    for _ in range(50):
        p = matcore.random_probability_vector(rng, 3, floor=0.05)
        q = matcore.random_probability_vector(rng, 3, floor=0.05)
        got = matcore.loewner_min_coefficient(
            DensityMatrix.diagonal(p), DensityMatrix.diagonal(q))
        assert abs(got - (p / q).max()) < 1e-9


def test_loewner_strict_infinite_outside_support():
    rho = DensityMatrix.pure([0, 1])
    sigma = DensityMatrix.pure([1, 0])
    assert matcore.loewner_min_coefficient(rho, sigma, strict=True) == math.inf


def test_loewner_order_certificate(rng):
    for _ in range(200):
        rho = matcore.random_density(rng, 3, mix=0.05)
        sigma = matcore.random_density(rng, 3, mix=0.05)
        c = matcore.loewner_min_coefficient(rho, sigma)
        gap = c * sigma.matrix - rho.matrix
        assert matcore.eigh(gap)[0][0] > -1e-9


def test_commuting_order_floor_equal_states(rng):
    rho = matcore.random_density(rng, 2, mix=0.1)
    assert matcore.commuting_order_floor(rho, rho) < 1e-12


def test_commuting_order_floor_diagonal():
    rho = DensityMatrix.diagonal([0.6, 0.4])
    sigma = DensityMatrix.diagonal([0.5, 0.5])
    eps = matcore.commuting_order_floor(rho, sigma)
    assert abs(eps - 0.1) < 1e-12


def test_commuting_order_floor_support_restricted():
    sigma = DensityMatrix.diagonal([1.0, 0.0])
    rho = DensityMatrix.diagonal([0.9, 0.1])
    eps = matcore.commuting_order_floor(rho, sigma)
    assert abs(eps - 0.1) < 1e-12


def test_commuting_order_floor_rejects_noncommuting():
    rho = DensityMatrix.pure([1, 1])
    sigma = DensityMatrix.diagonal([0.7, 0.3])
    with pytest.raises(ValueError, match="commute"):
        matcore.commuting_order_floor(rho, sigma)


def test_density_clamps_small_negative_eigenvalues():
    m = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
    rho = DensityMatrix.from_matrix(m)
    assert rho.eigenvalues[0] == 0.0
    assert abs(rho.eigenvalues.sum() - 1) < 1e-15


def test_density_rejects_big_negative_eigenvalue():
    with pytest.raises(ValueError, match="positive semidefinite"):
        DensityMatrix.from_matrix(np.diag([1.5, -0.5]).astype(complex))


def test_density_rejects_bad_trace():
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix.from_matrix(np.eye(2, dtype=complex))


def test_bipartite_dimension_check():
    with pytest.raises(ValueError, match="does not match"):
        BipartiteDensity(2, 2, DensityMatrix.maximally_mixed(6))


def test_rng_determinism_and_substreams():
    a = Rng(42)
    b = Rng(42)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
    s1 = Rng(42).substream(3)
    s2 = Rng(42).substream(3)
    assert s1.uniform() == s2.uniform()
    assert Rng(42).substream(3).uniform() != Rng(42).substream(4).uniform()
