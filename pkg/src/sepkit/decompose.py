"""Constructive ensembles that annihilate one pair operator.

Given scaled eigenvectors x_i of rho and a pair operator B, a Takagi
factorization of tau rotates the x_i into a canonical basis y_i with
<y_i| B |conj(y_j)> = lambda_i delta_ij.  When lambda_1 <= lambda_2 + ...
the lambdas close a polygon in the complex plane, and mixing the y_j with
half the closure phases and the columns of a signed Hadamard-type matrix
yields 4k pure states z_i that reassemble rho while every <z_i|B|conj(z_i)>
vanishes.
"""

from dataclasses import dataclass

import numpy as np

from .criterion import ScaledEigvecs, a_value, scaled_eigvecs, tau_matrix
from .linalg import takagi
from .pairs import PairIndex, PairOperator, build_pair_operator, pair_residual
from .states import DensityMatrix

__all__ = [
    "PolygonInfeasibleError",
    "PairCriterionError",
    "CanonicalBasis",
    "PureEnsemble",
    "EnsembleReport",
    "canonical_basis",
    "close_polygon",
    "sign_matrix",
    "single_pair_decomposition",
    "verify_ensemble",
]


class PolygonInfeasibleError(ValueError):
    """The largest length exceeds the sum of the others; no closed polygon exists."""


class PairCriterionError(ValueError):
    """The pair's a value is positive; no annihilating ensemble exists."""


@dataclass(frozen=True)
class CanonicalBasis:
    """Rows y_i with <y_i| B |conj(y_j)> = lambdas[i] delta_ij and sum |y_i><y_i| = rho."""

    vectors: np.ndarray
    lambdas: np.ndarray


def canonical_basis(x: ScaledEigvecs, b: PairOperator) -> CanonicalBasis:
    """Rotate scaled eigenvectors into the Takagi gauge of the pair's tau matrix."""
    tau = tau_matrix(x, b)
    t = takagi(tau)
    return CanonicalBasis(vectors=t.v.conj() @ x.vectors, lambdas=t.lambdas)


def _triangle_apex(a: float, c: float, t: float) -> tuple[float, complex]:
    """Apex angle alpha and remainder t - a e^{i alpha} of the (a, c, t) triangle.

    Uses half-angle factors instead of the law-of-cosines quotient: the
    arccos form loses half the digits on needle triangles (c much smaller
    than nearly equal a and t), which the closure guarantee cannot afford.
    """
    u = a - t
    num = max((c - u) * (c + u), 0.0)
    den = max((a + t + c) * ((a + t) - c), 0.0)
    hyp = num + den
    if hyp <= 0.0:
        return 0.0, complex(t - a, 0.0)
    alpha = 2.0 * float(np.arctan2(np.sqrt(num), np.sqrt(den)))
    sin_half2 = num / hyp
    sin_alpha = 2.0 * np.sqrt(sin_half2 * (den / hyp))
    return alpha, complex((t - a) + a * 2.0 * sin_half2, -a * sin_alpha)


def _solve_polygon(lengths: np.ndarray, target: float) -> np.ndarray:
    """Phases phi with sum(lengths * exp(i phi)) = target (real, >= 0).

    Recursive reduction: the largest length and the remainder's resultant
    form a triangle over the target; the remainder's resultant magnitude is
    chosen inside its own achievable interval, closest to |target - largest|.
    """
    p = lengths.shape[0]
    if p == 0:
        return np.zeros(0)
    if p == 1:
        return np.zeros(1)
    rest = lengths[1:]
    total = float(np.sum(rest))
    high = total
    low = max(0.0, 2.0 * float(rest[0]) - total) if total > 0.0 else 0.0
    r = min(max(abs(target - float(lengths[0])), low), high)
    if target <= 0.0:
        alpha = 0.0
        resultant = complex(-r, 0.0)
    else:
        alpha, resultant = _triangle_apex(float(lengths[0]), r, target)
    beta = float(np.angle(resultant)) if r > 0.0 else 0.0
    return np.concatenate([[alpha], _solve_polygon(rest, r) + beta])


def close_polygon(lengths, feas_tol: float = 1e-12) -> np.ndarray:
    """Phases phi_j such that sum_j lengths[j] exp(i phi_j) = 0.

    Requires max(lengths) <= sum of the others (within feas_tol relative
    to the total); otherwise raises PolygonInfeasibleError.  Zero lengths
    get phase 0.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.ndim != 1 or lengths.shape[0] == 0:
        raise ValueError("lengths must be a nonempty 1-d array")
    if np.any(lengths < 0.0) or not np.all(np.isfinite(lengths)):
        raise ValueError("lengths must be finite and nonnegative")
    total = float(np.sum(lengths))
    if total == 0.0:
        return np.zeros_like(lengths)
    order = np.argsort(-lengths, kind="stable")
    sorted_lengths = lengths[order]
    excess = 2.0 * sorted_lengths[0] - total
    if excess > feas_tol * total:
        raise PolygonInfeasibleError(
            f"longest length {sorted_lengths[0]:.6g} exceeds the sum of the others "
            f"by {excess:.3e}")
    phases = np.zeros_like(lengths)
    phases[order] = np.mod(_solve_polygon(sorted_lengths, 0.0), 2.0 * np.pi)
    phases[lengths == 0.0] = 0.0
    return phases


def _bit_reverse(value: int, bits: int) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def sign_matrix(k: int, l: int) -> np.ndarray:
    """First l columns of the 4k x 4k signed matrix with mutually orthogonal columns.

    Entry (r, j), 1-based, is (-1)**popcount(bitrev(r-1) & (j-1)) over
    log2(4k) bits.  4k must be a power of two and at least max(4, l);
    the first column is all +1.
    """
    rows = 4 * k
    if k < 1 or rows & (rows - 1) != 0:
        raise ValueError(f"4k must be a power of two, got 4k={rows}")
    if not 1 <= l <= rows:
        raise ValueError(f"need 1 <= l <= 4k, got l={l}, 4k={rows}")
    bits = rows.bit_length() - 1
    out = np.empty((rows, l), dtype=int)
    for r in range(rows):
        rev = _bit_reverse(r, bits)
        for j in range(l):
            out[r, j] = -1 if bin(rev & j).count("1") % 2 else 1
    return out


def _member_count(l: int) -> int:
    k = 1
    while 4 * k < max(4, l):
        k *= 2
    return k


@dataclass(frozen=True)
class PureEnsemble:
    """Rows are unnormalized pure states with sum |z_i><z_i| = rho."""

    members: np.ndarray
    m: int
    n: int


def single_pair_decomposition(rho: DensityMatrix, pair: PairIndex,
                              k: int | None = None, rank_tol: float = 1e-10,
                              boundary_tol: float = 1e-9) -> PureEnsemble:
    """Ensemble of 4k pure states reassembling rho with zero residual on one pair.

    Requires the pair's a value <= boundary_tol.  k defaults to the
    smallest power of two with 4k >= max(4, l); an explicit k must satisfy
    the same constraint.
    """
    x = scaled_eigvecs(rho, rank_tol)
    b = build_pair_operator(rho.m, rho.n, pair)
    basis = canonical_basis(x, b)
    lam = basis.lambdas
    l = lam.shape[0]
    l_prime = int(np.sum(lam > rank_tol))
    a = a_value(lam, l_prime)
    if a > boundary_tol:
        raise PairCriterionError(
            f"pair ({pair.p}, {pair.q}) has a = {a:.3e} > {boundary_tol:.1e}; "
            "no annihilating ensemble exists")
    if k is None:
        k = _member_count(l)
    theta = close_polygon(lam) / 2.0
    signs = sign_matrix(k, l)
    coeff = signs * np.exp(1j * theta)[None, :] / (2.0 * np.sqrt(k))
    return PureEnsemble(members=coeff @ basis.vectors, m=rho.m, n=rho.n)


@dataclass(frozen=True)
class EnsembleReport:
    """Verification summary for an ensemble against a state and pair operators."""

    reconstruction_error: float
    max_pair_residual: float
    member_product_errors: np.ndarray

    def ok(self, tol: float = 1e-10, product_tol: float = 1e-6) -> bool:
        return (self.reconstruction_error <= tol
                and self.max_pair_residual <= tol
                and bool(np.all(self.member_product_errors <= product_tol)))


def verify_ensemble(ensemble: PureEnsemble, rho: DensityMatrix,
                    pairs: list[PairOperator]) -> EnsembleReport:
    """Reconstruction error, worst pair residual, and per-member product errors.

    The product error of a member is its second singular value relative to
    its first (0 for members of negligible norm).
    """
    z = ensemble.members
    recon = np.einsum("ia,ib->ab", z, z.conj())
    recon_err = float(np.linalg.norm(recon - rho.matrix))
    max_residual = 0.0
    for b in pairs:
        for i in range(z.shape[0]):
            max_residual = max(max_residual, abs(pair_residual(b, z[i])))
    product_errors = np.zeros(z.shape[0])
    for i in range(z.shape[0]):
        s = np.linalg.svd(z[i].reshape(ensemble.m, ensemble.n), compute_uv=False)
        if s[0] > 1e-12 and min(ensemble.m, ensemble.n) > 1:
            product_errors[i] = s[1] / s[0]
    return EnsembleReport(reconstruction_error=recon_err,
                          max_pair_residual=max_residual,
                          member_product_errors=product_errors)
