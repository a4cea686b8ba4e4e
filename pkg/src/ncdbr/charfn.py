"""Characteristic functions, operator Moebius calculus, Frostman shifts,
Popescu's characteristic function, supports and weak coincidence.

Every operator-valued function of a ball point is wrapped as a
SchurSampler, which records the coefficient-space dimensions and a
provenance tag and evaluates in the fixed tensor layout: a value at a
level-n point is an (output_dim*n) x (input_dim*n) matrix whose (p, q)
coefficient block has size output_dim x input_dim.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ConstancyViolated,
    DenominatorSingular,
    DimensionMismatch,
    NotStrict,
    SingularPencil,
)
from .ncspace import (
    MatrixTuple,
    coeff_lift,
    pencil_tz_star,
    point_block,
    sample_ball_point,
    zero_tuple,
)
from .numerics import DEFAULT_TOL, fit_unitary, orthonormal_range, pinv, psd_sqrt
from .rowcontraction import (
    canonical_frames,
    cnc_rank,
    defects,
    defect_point,
    iso_pure_decompose,
)

__all__ = [
    "SchurSampler",
    "model_gamma",
    "char_fn_partial_isometry",
    "char_fn",
    "popescu_char",
    "moebius",
    "moebius_inv",
    "xi_map",
    "theta_map",
    "frostman_shift",
    "support_frames",
    "weak_coincidence_fit",
    "pure_unitary_split",
]


@dataclass(frozen=True)
class SchurSampler:
    """Evaluatable operator-valued function on the row-ball."""

    d: int
    input_dim: int
    output_dim: int
    evaluator: Callable
    tag: str = "literal"

    def __call__(self, Z):
        if Z.d != self.d:
            raise DimensionMismatch("point has d=%d, sampler expects %d" % (Z.d, self.d))
        value = np.asarray(self.evaluator(Z), dtype=complex)
        expected = (self.output_dim * Z.n, self.input_dim * Z.n)
        if value.shape != expected:
            raise DimensionMismatch(
                "evaluator returned %s, expected %s" % (value.shape, expected)
            )
        return value

    def at_zero(self):
        """The coefficient-space value B(0) as an output_dim x input_dim matrix."""
        return self(zero_tuple(self.d, 1))


def _solve_pencil(pencil, rhs, tol, exc=SingularPencil, limit=None):
    sv = np.linalg.svd(pencil, compute_uv=False)
    cond = sv[0] / max(sv[-1], 1e-300)
    ceiling = limit if limit is not None else 1.0 / tol.rank_rel
    if sv[-1] == 0.0 or cond > ceiling:
        raise exc("condition number %.3e" % cond)
    return np.linalg.solve(pencil, rhs)


def model_gamma(V, Z, tol=DEFAULT_TOL):
    """Canonical model map value [I - V Z^*]^{-1} (gamma0 (x) I_n)."""
    frames = canonical_frames(V, tol)
    pencil = pencil_tz_star(V.ops, Z)
    return _solve_pencil(pencil, coeff_lift(frames.gamma0, Z.n), tol)


def char_fn_partial_isometry(V, tol=DEFAULT_TOL):
    """Characteristic function B_V of a row partial isometry.

    Evaluates D(Z)^{-1} N(Z) on the canonical-frame compression, where
    D(Z) = gamma0* [I - Z V^*]^{-1} gamma0 and
    N(Z) = gamma0* [I - Z V^*]^{-1} [I (x) Z] gammaInf, all amplified to
    the level of Z.  Satisfies B_V(0) = 0.
    """
    frames = canonical_frames(V, tol)
    g0 = frames.gamma0
    m, p = g0.shape
    q = frames.gammaInf.shape[1]
    g_inf_blocks = [frames.gammaInf[j * m : (j + 1) * m, :] for j in range(V.d)]

    def ev(Z):
        n = Z.n
        if p == 0 or q == 0:
            return np.zeros((p * n, q * n), dtype=complex)
        # [I - Z V^*] is the adjoint of the model-map pencil [I - V Z^*]
        pencil = pencil_tz_star(V.ops, Z).conj().T
        G0 = coeff_lift(g0, n)
        rhs = np.hstack([G0, point_block(Z, g_inf_blocks)])
        sol = np.linalg.solve(pencil, rhs)
        D = G0.conj().T @ sol[:, : p * n]
        N = G0.conj().T @ sol[:, p * n :]
        return _solve_pencil(D, N, tol, exc=DenominatorSingular, limit=1e12)

    return SchurSampler(d=V.d, input_dim=q, output_dim=p, evaluator=ev, tag="char_fn")


def char_fn(T, tol=DEFAULT_TOL):
    """Characteristic function B_T of a row contraction.

    Built as the operator-Moebius transform of B_V at minus the defect
    point: B_T(Z) = D_{delta*} (I + B_V(Z) delta*)^{-1} (B_V(Z) + delta)
    D_delta^{-1}, amplified per level.  Satisfies B_T(0) = delta.
    """
    parts = iso_pure_decompose(T, tol)
    B_V = char_fn_partial_isometry(parts.V, tol)
    delta = defect_point(T, tol)
    D_delta_inv = pinv(
        psd_sqrt(np.eye(delta.shape[1]) - delta.conj().T @ delta, tol), tol
    )
    D_delta_star = psd_sqrt(np.eye(delta.shape[0]) - delta @ delta.conj().T, tol)

    def ev(Z):
        n = Z.n
        BZ = B_V(Z)
        denom = np.eye(BZ.shape[0], dtype=complex) + BZ @ coeff_lift(delta.conj().T, n)
        core = np.linalg.solve(denom, BZ + coeff_lift(delta, n))
        return coeff_lift(D_delta_star, n) @ core @ coeff_lift(D_delta_inv, n)

    return SchurSampler(
        d=T.d,
        input_dim=B_V.input_dim,
        output_dim=B_V.output_dim,
        evaluator=ev,
        tag="char_fn",
    )


def popescu_char(T, tol=DEFAULT_TOL):
    """Sz.-Nagy--Foias--Popescu characteristic function Theta_T.

    Theta_T(Z) = (-T + D_{T*} [I - Z T^*]^{-1} [I (x) Z] D_T) compressed to
    the defect ranges, amplified per level.
    """
    D_T, D_Tstar = defects(T, tol)
    F_in = orthonormal_range(D_T, tol)
    F_out = orthonormal_range(D_Tstar, tol)
    m = T.m
    lifted_in = D_T @ F_in
    in_blocks = [lifted_in[j * m : (j + 1) * m, :] for j in range(T.d)]
    const = -F_out.conj().T @ T.row() @ F_in
    left = F_out.conj().T @ D_Tstar

    def ev(Z):
        n = Z.n
        pencil = pencil_tz_star(T.ops, Z).conj().T
        sol = np.linalg.solve(pencil, point_block(Z, in_blocks))
        return coeff_lift(const, n) + coeff_lift(left, n) @ sol

    return SchurSampler(
        d=T.d,
        input_dim=F_in.shape[1],
        output_dim=F_out.shape[1],
        evaluator=ev,
        tag="popescu",
    )


def _moebius_defects(alpha, tol):
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.size and np.linalg.norm(alpha, 2) >= 1.0 - 1e-12:
        raise NotStrict("alpha must be a strict contraction")
    D_a = psd_sqrt(np.eye(alpha.shape[1]) - alpha.conj().T @ alpha, tol)
    D_a_star = psd_sqrt(np.eye(alpha.shape[0]) - alpha @ alpha.conj().T, tol)
    return alpha, D_a, D_a_star


def _lift_level(alpha, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    p, q = alpha.shape
    if p == 0 or q == 0:
        if zeta.size:
            raise DimensionMismatch("zeta incompatible with empty alpha")
        return 1, zeta
    if zeta.shape[0] % p or zeta.shape[1] % q:
        raise DimensionMismatch("zeta shape is not an amplification of alpha")
    ell = zeta.shape[0] // p
    if zeta.shape[1] // q != ell:
        raise DimensionMismatch("row and column amplification levels differ")
    return ell, zeta


def moebius(alpha, zeta, tol=DEFAULT_TOL):
    """Operator Moebius map D_{a*} (I - zeta a*)^{-1} (zeta - a) D_a^{-1},
    with zeta allowed at any amplification level of alpha."""
    alpha, D_a, D_a_star = _moebius_defects(alpha, tol)
    ell, zeta = _lift_level(alpha, zeta)
    denom = np.eye(zeta.shape[0], dtype=complex) - zeta @ coeff_lift(alpha.conj().T, ell)
    core = np.linalg.solve(denom, zeta - coeff_lift(alpha, ell))
    return coeff_lift(D_a_star, ell) @ core @ coeff_lift(pinv(D_a, tol), ell)


def moebius_inv(alpha, zeta, tol=DEFAULT_TOL):
    """Inverse Moebius map D_{a*}^{-1} (zeta + a)(I + a* zeta)^{-1} D_a."""
    alpha, D_a, D_a_star = _moebius_defects(alpha, tol)
    ell, zeta = _lift_level(alpha, zeta)
    denom = np.eye(zeta.shape[1], dtype=complex) + coeff_lift(alpha.conj().T, ell) @ zeta
    core = np.linalg.solve(denom.conj().T, (zeta + coeff_lift(alpha, ell)).conj().T).conj().T
    return coeff_lift(pinv(D_a_star, tol), ell) @ core @ coeff_lift(D_a, ell)


def xi_map(alpha, beta, tol=DEFAULT_TOL):
    """Xi factor (D_{a*} (x) I)(I - beta (a* (x) I))^{-1} of the Moebius map."""
    alpha, _, D_a_star = _moebius_defects(alpha, tol)
    ell, beta = _lift_level(alpha, beta)
    denom = np.eye(beta.shape[0], dtype=complex) - beta @ coeff_lift(alpha.conj().T, ell)
    return np.linalg.solve(denom.conj().T, coeff_lift(D_a_star, ell).conj().T).conj().T


def theta_map(alpha, beta, tol=DEFAULT_TOL):
    """Theta factor (beta - a (x) I)(D_a^{-1} (x) I) of the Moebius map."""
    alpha, D_a, _ = _moebius_defects(alpha, tol)
    ell, beta = _lift_level(alpha, beta)
    return (beta - coeff_lift(alpha, ell)) @ coeff_lift(pinv(D_a, tol), ell)


def frostman_shift(B, alpha, tol=DEFAULT_TOL):
    """Moebius renormalization of B moving its value at 0 to alpha.

    First normalizes to B0 with B0(0) = 0 via the Moebius map at B(0),
    then applies the inverse Moebius map at alpha.
    """
    b0 = B.at_zero()
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != b0.shape:
        raise DimensionMismatch("alpha must match the coefficient spaces of B")
    _, D0, D0_star = _moebius_defects(b0, tol)
    D0_inv = pinv(D0, tol)
    shift_needed = bool(np.linalg.norm(alpha, 2) > 0)
    if shift_needed:
        _moebius_defects(alpha, tol)

    def ev(Z):
        n = Z.n
        BZ = B(Z)
        denom = np.eye(BZ.shape[0], dtype=complex) - BZ @ coeff_lift(b0.conj().T, n)
        normalized = (
            coeff_lift(D0_star, n)
            @ np.linalg.solve(denom, BZ - coeff_lift(b0, n))
            @ coeff_lift(D0_inv, n)
        )
        if not shift_needed:
            return normalized
        return moebius_inv(alpha, normalized, tol)

    return SchurSampler(
        d=B.d,
        input_dim=B.input_dim,
        output_dim=B.output_dim,
        evaluator=ev,
        tag="frostman",
    )


def _value_blocks(B, value, n):
    """All coefficient blocks of a level-n value, as a 4-d view."""
    return value.reshape(n, B.output_dim, n, B.input_dim)


def support_frames(B, sample_points, tol=DEFAULT_TOL):
    """Numerical support frames (supp_in, supp_out) of a sampler.

    Spans the coefficient blocks of sampled values; sampling more points
    can only grow the span, so the result is a certified lower bound,
    taken as the support once the rank is stable across two successive
    enlargements.
    """
    if not sample_points:
        raise ValueError("need at least one sample point")
    out_cols = [np.zeros((B.output_dim, 0))]
    in_cols = [np.zeros((B.input_dim, 0))]
    ranks = []
    for Z in sample_points:
        blocks = _value_blocks(B, B(Z), Z.n)
        for pidx in range(Z.n):
            for qidx in range(Z.n):
                blk = blocks[pidx, :, qidx, :]
                out_cols.append(blk)
                in_cols.append(blk.conj().T)
        supp_out = orthonormal_range(np.hstack(out_cols), tol)
        supp_in = orthonormal_range(np.hstack(in_cols), tol)
        ranks.append((supp_in.shape[1], supp_out.shape[1]))
        if len(ranks) >= 3 and ranks[-1] == ranks[-2] == ranks[-3]:
            break
    return supp_in, supp_out


def _restrict(B, supp_in, supp_out):
    def ev(Z):
        return coeff_lift(supp_out, Z.n).conj().T @ B(Z) @ coeff_lift(supp_in, Z.n)

    return SchurSampler(
        d=B.d,
        input_dim=supp_in.shape[1],
        output_dim=supp_out.shape[1],
        evaluator=ev,
        tag=B.tag,
    )


def _unstack_level(M, block_rows):
    """Reshape so that left multiplication by kron(I_n, U) becomes plain
    left multiplication by U."""
    n = M.shape[0] // block_rows
    return M.reshape(n, block_rows, M.shape[1]).transpose(1, 0, 2).reshape(block_rows, -1)


def _coincidence_residual(levels, vals1, vals2, U_out, U_in):
    worst = 0.0
    for n, M1, M2 in zip(levels, vals1, vals2):
        lhs = coeff_lift(U_out, n) @ M1
        rhs = M2 @ coeff_lift(U_in, n)
        if lhs.size:
            worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


def _polar_unitary(M):
    W, _, Vh = np.linalg.svd(M)
    return W @ Vh


def _nullspace_init(levels, vals1, vals2, p, q):
    """Global initialization for the bilinear coincidence fit.

    The relation (U_out (x) I) B1(Z) - B2(Z) (U_in (x) I) = 0 is linear in
    the pair (U_out, U_in); the smallest right singular vector of the
    stacked constraint matrix recovers the pair up to a common scale,
    which the polar projection removes.
    """
    if p == 0 or q == 0:
        return None
    rows = []
    for n, M1, M2 in zip(levels, vals1, vals2):
        block = np.zeros((M1.shape[0] * M1.shape[1], p * p + q * q), dtype=complex)
        for a in range(p):
            for b in range(p):
                E = np.zeros((p, p))
                E[a, b] = 1.0
                block[:, a * p + b] = (coeff_lift(E, n) @ M1).ravel()
        for a in range(q):
            for b in range(q):
                E = np.zeros((q, q))
                E[a, b] = 1.0
                block[:, p * p + a * q + b] = -(M2 @ coeff_lift(E, n)).ravel()
        rows.append(block)
    _, _, Vh = np.linalg.svd(np.vstack(rows))
    # right null vector is a column of V = Vh^H, hence the conjugate
    vec = Vh[-1].conj()
    U_out = vec[: p * p].reshape(p, p)
    U_in = vec[p * p :].reshape(q, q)
    if np.linalg.norm(U_out, 2) < 1e-12 or np.linalg.norm(U_in, 2) < 1e-12:
        return None
    return _polar_unitary(U_out), _polar_unitary(U_in)


def weak_coincidence_fit(B1, B2, fit_points, holdout_points, tol=1e-8, num_tol=DEFAULT_TOL):
    """Fit constant unitaries with (U_out (x) I) B1(Z) = B2(Z) (U_in (x) I)
    after restricting both samplers to their supports.

    Alternating Procrustes over the fit points (at most 50 sweeps,
    convergence 1e-12), initialized from the values at zero; the residual
    is the worst holdout mismatch and the verdict compares it to tol.
    """
    s1_in, s1_out = support_frames(B1, fit_points, num_tol)
    s2_in, s2_out = support_frames(B2, fit_points, num_tol)
    if s1_in.shape[1] != s2_in.shape[1] or s1_out.shape[1] != s2_out.shape[1]:
        return None, None, float("inf"), False
    R1 = _restrict(B1, s1_in, s1_out)
    R2 = _restrict(B2, s2_in, s2_out)
    p = s1_out.shape[1]
    q = s1_in.shape[1]
    if p == 0 and q == 0:
        return np.zeros((0, 0)), np.zeros((0, 0)), 0.0, True

    anchor = zero_tuple(B1.d, 1)
    points = [anchor] + list(fit_points)
    levels = [Z.n for Z in points]
    vals1 = [R1(Z) for Z in points]
    vals2 = [R2(Z) for Z in points]
    hold_levels = [Z.n for Z in holdout_points]
    hold1 = [R1(Z) for Z in holdout_points]
    hold2 = [R2(Z) for Z in holdout_points]

    def alternate(U_out, U_in):
        for _ in range(50):
            prev = (U_out.copy(), U_in.copy())
            if p:
                pairs = [
                    (_unstack_level(M1, p), _unstack_level(M2 @ coeff_lift(U_in, n), p))
                    for n, M1, M2 in zip(levels, vals1, vals2)
                ]
                U_out, _ = fit_unitary(pairs)
            if q:
                pairs = [
                    (
                        _unstack_level(M2.conj().T, q),
                        _unstack_level(M1.conj().T @ coeff_lift(U_out.conj().T, n), q),
                    )
                    for n, M1, M2 in zip(levels, vals1, vals2)
                ]
                V, _ = fit_unitary(pairs)
                U_in = V.conj().T
            if (
                np.linalg.norm(U_out - prev[0]) < 1e-12
                and np.linalg.norm(U_in - prev[1]) < 1e-12
            ):
                break
        return U_out, U_in

    inits = [(np.eye(p, dtype=complex), np.eye(q, dtype=complex))]
    if vals1[0].size and vals2[0].size:
        P1, _, Q1h = np.linalg.svd(vals1[0])
        P2, _, Q2h = np.linalg.svd(vals2[0])
        inits.append((P2 @ P1.conj().T, Q2h.conj().T @ Q1h))
    null_init = _nullspace_init(levels, vals1, vals2, p, q)
    if null_init is not None:
        inits.append(null_init)

    best = (None, None, float("inf"))
    for U_out0, U_in0 in inits:
        U_out, U_in = alternate(U_out0, U_in0)
        res = _coincidence_residual(hold_levels, hold1, hold2, U_out, U_in)
        if res < best[2]:
            best = (U_out, U_in, res)
    U_out, U_in, residual = best
    return U_out, U_in, residual, bool(residual <= tol)


def pure_unitary_split(B, tol=DEFAULT_TOL, sample_points=None):
    """Split the coefficient spaces into the subspace where B is a unitary
    constant and its pure complement.

    Returns ((pure_in, pure_out), (unitary_in, unitary_out)); raises
    ConstancyViolated when B fails to be constant on the detected
    unitary subspace at the sampled points.
    """
    b0 = B.at_zero()
    w_in, Q_in = np.linalg.eigh(b0.conj().T @ b0)
    w_out, Q_out = np.linalg.eigh(b0 @ b0.conj().T)
    uni_in = Q_in[:, np.abs(w_in - 1.0) <= 100 * tol.eq_abs]
    uni_out = Q_out[:, np.abs(w_out - 1.0) <= 100 * tol.eq_abs]
    pure_in = Q_in[:, np.abs(w_in - 1.0) > 100 * tol.eq_abs]
    pure_out = Q_out[:, np.abs(w_out - 1.0) > 100 * tol.eq_abs]
    if uni_in.shape[1] != uni_out.shape[1]:
        raise ConstancyViolated("unitary eigenspaces have mismatched dimensions")
    if sample_points is None:
        sample_points = [
            sample_ball_point(B.d, n, 0.6, seed) for n, seed in ((1, 11), (2, 12), (2, 13))
        ]
    if uni_in.shape[1]:
        for Z in sample_points:
            diff = B(Z) @ coeff_lift(uni_in, Z.n) - coeff_lift(b0 @ uni_in, Z.n)
            if np.linalg.norm(diff, 2) > 1e-9:
                raise ConstancyViolated("B is not constant on the unitary subspace")
    return (pure_in, pure_out), (uni_in, uni_out)
