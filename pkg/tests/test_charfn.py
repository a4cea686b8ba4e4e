import numpy as np
import pytest

from conftest import ball_points, random_contraction, random_partial_isometry
from ncdbr.charfn import (
    SchurSampler,
    char_fn,
    char_fn_partial_isometry,
    frostman_shift,
    model_gamma,
    moebius,
    moebius_inv,
    popescu_char,
    pure_unitary_split,
    support_frames,
    theta_map,
    weak_coincidence_fit,
    xi_map,
)
from ncdbr.errors import ConstancyViolated, DimensionMismatch, NotStrict
from ncdbr.ncspace import (
    MatrixTuple,
    coeff_lift,
    conjugate,
    direct_sum,
    row_norm,
    sample_ball_point,
)
from ncdbr.rowcontraction import RowContraction, canonical_frames, defect_point

JORDAN = RowContraction((np.array([[0.0, 0.0], [1.0, 0.0]]),))
HALF = RowContraction((np.array([[0.5]]),))


def scalar_point(z):
    return MatrixTuple((np.array([[complex(z)]]),))


def test_scalar_classical_reduction():
    B = char_fn(HALF)
    for z in np.linspace(-0.8, 0.8, 10):
        expected = (z - 0.5) / (1.0 - 0.5 * z)
        assert abs(B(scalar_point(z))[0, 0] - expected) < 1e-10


def test_jordan_char_is_z_squared():
    B = char_fn_partial_isometry(JORDAN)
    for z in (0.3, -0.5, 0.2 + 0.4j):
        assert abs(B(scalar_point(z))[0, 0] - z * z) < 1e-10
    # level 2: the same identity holds entrywise
    Z = sample_ball_point(1, 2, 0.6, 3)
    assert np.linalg.norm(B(Z) - Z.coords[0] @ Z.coords[0]) < 1e-10


def test_char_fn_zero_values():
    V = random_partial_isometry(1, 2, 3, 1)
    BV = char_fn_partial_isometry(V)
    assert np.linalg.norm(BV.at_zero()) < 1e-12
    T = random_contraction(2, 2, 3)
    assert np.linalg.norm(char_fn(T).at_zero() - defect_point(T), 2) < 1e-10


def test_char_fn_of_partial_isometry_is_bv():
    V = random_partial_isometry(4, 2, 3, 2)
    B1 = char_fn(V)
    B2 = char_fn_partial_isometry(V)
    for Z in ball_points(2, 4, seed=10):
        assert np.linalg.norm(B1(Z) - B2(Z), 2) < 1e-10


def test_char_fn_zero_operator_is_coordinate_row():
    T = RowContraction((np.zeros((1, 1)), np.zeros((1, 1))))
    B = char_fn(T)
    Z = sample_ball_point(2, 2, 0.6, 8)
    # input coefficient index is fast, so the row interleaves coordinates
    expected = np.kron(Z.coords[0], [[1.0, 0.0]]) + np.kron(Z.coords[1], [[0.0, 1.0]])
    assert np.linalg.norm(B(Z) - expected) < 1e-12


def test_model_gamma_examples():
    frames = canonical_frames(JORDAN)
    Z0 = MatrixTuple((np.zeros((1, 1)),))
    assert np.allclose(model_gamma(JORDAN, Z0), frames.gamma0)
    # scalar z: the resolvent applied to e1 gives (1, z) for the Jordan block
    Z = scalar_point(0.4)
    assert np.allclose(model_gamma(JORDAN, Z), [[1.0], [0.4]])
    V0 = RowContraction((np.zeros((2, 2)),))
    f0 = canonical_frames(V0)
    Z = sample_ball_point(1, 2, 0.5, 2)
    assert np.allclose(model_gamma(V0, Z), coeff_lift(f0.gamma0, 2))


def test_nc_function_axioms():
    T = random_contraction(5, 2, 3)
    B = char_fn(T)
    Z = sample_ball_point(2, 1, 0.5, 21)
    W = sample_ball_point(2, 2, 0.5, 22)
    # direct sums are respected
    val = B(direct_sum(Z, W))
    blocks = val.reshape(3, B.output_dim, 3, B.input_dim)
    gz = B(Z).reshape(1, B.output_dim, 1, B.input_dim)
    gw = B(W).reshape(2, B.output_dim, 2, B.input_dim)
    assert np.linalg.norm(blocks[:1, :, :1, :] - gz) < 1e-9
    assert np.linalg.norm(blocks[1:, :, 1:, :] - gw) < 1e-9
    assert np.linalg.norm(blocks[:1, :, 1:, :]) < 1e-9
    # unitary similarity is respected
    rng = np.random.default_rng(9)
    Q = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    Wq = conjugate(W, Q)
    lhs = B(Wq)
    rhs = (
        np.kron(np.linalg.inv(Q), np.eye(B.output_dim))
        @ B(W)
        @ np.kron(Q, np.eye(B.input_dim))
    )
    assert np.linalg.norm(lhs - rhs) < 1e-9


def test_nc_schwarz_for_bv():
    for seed in range(4):
        V = random_partial_isometry(70 + seed, 1 + seed % 3, 3, 1)
        B = char_fn_partial_isometry(V)
        for Z in ball_points(V.d, 4, radius=0.6, seed=33):
            val = B(Z)
            if val.size:
                assert np.linalg.norm(val, 2) <= row_norm(Z) + 1e-8


def test_moebius_inverse_composition(rng):
    for trial in range(10):
        p, q = 2 + trial % 2, 3 - trial % 2
        alpha = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        alpha *= 0.6 / np.linalg.norm(alpha, 2)
        zeta = rng.standard_normal((2 * p, 2 * q)) + 1j * rng.standard_normal((2 * p, 2 * q))
        zeta *= 0.8 / np.linalg.norm(zeta, 2)
        w = moebius(alpha, zeta)
        assert np.linalg.norm(w, 2) < 1.0
        assert np.linalg.norm(moebius_inv(alpha, w) - zeta) < 1e-10
        assert np.linalg.norm(moebius(alpha, coeff_lift(alpha, 2))) < 1e-12


def test_moebius_factorization_and_adjunction(rng):
    for trial in range(10):
        p, q, m, n = 2, 3, 2, 3
        cm = lambda r, c: rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
        alpha = cm(p, q)
        alpha *= 0.6 / np.linalg.norm(alpha, 2)
        beta = cm(p * m, q * m)
        beta *= 0.8 / np.linalg.norm(beta, 2)
        gamma = cm(p * n, q * n)
        gamma *= 0.8 / np.linalg.norm(gamma, 2)
        assert (
            np.linalg.norm(xi_map(alpha, beta) @ theta_map(alpha, beta) - moebius(alpha, beta))
            < 1e-10
        )
        A = cm(m, n)
        lhs = np.kron(A, np.eye(p)) - moebius(alpha, beta) @ np.kron(A, np.eye(q)) @ moebius(
            alpha, gamma
        ).conj().T
        rhs = (
            xi_map(alpha, beta)
            @ (np.kron(A, np.eye(p)) - beta @ np.kron(A, np.eye(q)) @ gamma.conj().T)
            @ xi_map(alpha, gamma).conj().T
        )
        assert np.linalg.norm(lhs - rhs) < 1e-9


def test_moebius_rejects_non_strict():
    with pytest.raises(NotStrict):
        moebius(np.eye(2), np.zeros((2, 2)))


def test_frostman_fixed_point():
    for seed in range(4):
        T = random_contraction(seed, 1 + seed % 3, 2 + seed % 2)
        B = char_fn(T)
        shifted = frostman_shift(B, B.at_zero())
        for Z in ball_points(T.d, 3, seed=44):
            assert np.linalg.norm(B(Z) - shifted(Z), 2) < 1e-9


def test_frostman_moves_value_at_zero():
    T = random_contraction(6, 2, 2)
    B = char_fn(T)
    p, q = B.output_dim, B.input_dim
    rng = np.random.default_rng(7)
    alpha = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    alpha *= 0.5 / np.linalg.norm(alpha, 2)
    shifted = frostman_shift(B, alpha)
    assert np.linalg.norm(shifted.at_zero() - alpha, 2) < 1e-9
    with pytest.raises(DimensionMismatch):
        frostman_shift(B, np.zeros((p + 1, q)))


def test_weak_coincidence_positive_and_negative():
    T = random_contraction(11, 2, 3)
    fit = ball_points(2, 6, seed=100)
    hold = ball_points(2, 4, seed=900)
    _, _, res, ok = weak_coincidence_fit(char_fn(T), popescu_char(T), fit, hold)
    assert ok and res < 1e-8
    # z against z^2 admits no constant-unitary intertwining
    b1 = SchurSampler(d=1, input_dim=1, output_dim=1, evaluator=lambda Z: Z.coords[0], tag="z")
    b2 = SchurSampler(
        d=1, input_dim=1, output_dim=1, evaluator=lambda Z: Z.coords[0] @ Z.coords[0], tag="zz"
    )
    fit1 = ball_points(1, 6, seed=100)
    hold1 = ball_points(1, 4, seed=900)
    _, _, res, ok = weak_coincidence_fit(b1, b2, fit1, hold1)
    assert not ok and res > 1e-3


def test_weak_coincidence_support_mismatch():
    b1 = SchurSampler(d=1, input_dim=1, output_dim=1, evaluator=lambda Z: Z.coords[0], tag="z")
    zero = SchurSampler(
        d=1,
        input_dim=1,
        output_dim=1,
        evaluator=lambda Z: np.zeros((Z.n, Z.n), dtype=complex),
        tag="0",
    )
    fit = ball_points(1, 5, seed=100)
    hold = ball_points(1, 3, seed=900)
    _, _, res, ok = weak_coincidence_fit(b1, zero, fit, hold)
    assert not ok and res == float("inf")


def test_support_frames_full_for_strict_contraction():
    T = random_contraction(12, 2, 3)
    B = char_fn(T)
    supp_in, supp_out = support_frames(B, ball_points(2, 6, seed=100))
    assert supp_in.shape == (B.input_dim, B.input_dim)
    assert supp_out.shape == (B.output_dim, B.output_dim)
    with pytest.raises(ValueError):
        support_frames(B, [])


def _block_sampler(b, U):
    """Coefficient-wise direct sum of a sampler and a constant unitary."""
    p, q = b.output_dim, b.input_dim
    u = U.shape[0]

    def ev(Z):
        n = Z.n
        out = np.zeros((n, p + u, n, q + u), dtype=complex)
        out[:, :p, :, :q] = b(Z).reshape(n, p, n, q)
        lift = coeff_lift(U, n).reshape(n, u, n, u)
        out[:, p:, :, q:] = lift
        return out.reshape(n * (p + u), n * (q + u))

    return SchurSampler(d=b.d, input_dim=q + u, output_dim=p + u, evaluator=ev, tag="blk")


def test_pure_unitary_split_cases(rng):
    # strictly contractive: no unitary part
    T = random_contraction(13, 2, 3)
    (pure_in, pure_out), (uni_in, uni_out) = pure_unitary_split(char_fn(T))
    assert uni_in.shape[1] == 0 and uni_out.shape[1] == 0
    assert pure_in.shape[1] == char_fn(T).input_dim
    # constant unitary: no pure part
    U = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    const = SchurSampler(
        d=1, input_dim=2, output_dim=2, evaluator=lambda Z: coeff_lift(U, Z.n), tag="u"
    )
    (pure_in, _), (uni_in, uni_out) = pure_unitary_split(const)
    assert pure_in.shape[1] == 0 and uni_in.shape[1] == 2
    # block fixture recovers the split dimensions
    B = _block_sampler(char_fn(T), U)
    (pure_in, pure_out), (uni_in, uni_out) = pure_unitary_split(B)
    assert uni_in.shape[1] == 2 and uni_out.shape[1] == 2
    assert pure_in.shape[1] == B.input_dim - 2
    assert pure_out.shape[1] == B.output_dim - 2


def test_pure_unitary_split_flags_nonconstant():
    # value at 0 is unitary but the function moves: not Schur
    fake = SchurSampler(
        d=1,
        input_dim=1,
        output_dim=1,
        evaluator=lambda Z: np.eye(Z.n, dtype=complex) - Z.coords[0] @ Z.coords[0],
        tag="fake",
    )
    with pytest.raises(ConstancyViolated):
        pure_unitary_split(fake)


def test_sampler_shape_guard():
    bad = SchurSampler(
        d=1, input_dim=2, output_dim=1, evaluator=lambda Z: np.eye(Z.n), tag="bad"
    )
    with pytest.raises(DimensionMismatch):
        bad(sample_ball_point(1, 1, 0.5, 0))
