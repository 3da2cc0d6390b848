"""Bipartite density matrices: validated container, state zoo, file format.

The text format is line-oriented: a header ``dims m n`` followed by
mn rows of mn whitespace-separated ``re,im`` entries, each number
printed with 17 significant digits so that parse(serialize(rho))
round-trips bit for bit.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DensityMatrix",
    "StateFormatError",
    "density_matrix",
    "bound_2x4",
    "bound_2x4_basis",
    "werner_2x2",
    "bell",
    "product",
    "isotropic",
    "random_density",
    "random_separable",
    "parse_state",
    "serialize_state",
    "format_float",
]


class StateFormatError(ValueError):
    """Malformed state file; the message carries the offending line number."""


@dataclass(frozen=True)
class DensityMatrix:
    """A bipartite state: dims (m, n) and the mn x mn matrix, first factor m-dimensional."""

    m: int
    n: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.m * self.n


def density_matrix(m: int, n: int, matrix, herm_tol: float = 1e-8,
                   trace_tol: float = 1e-8, psd_tol: float = 1e-8) -> DensityMatrix:
    """Validate and wrap a density matrix.

    Checks shape, Hermiticity, unit trace, and positive semidefiniteness
    (eigenvalues >= -psd_tol).
    """
    if m < 1 or n < 1:
        raise ValueError(f"dims must be positive, got ({m}, {n})")
    mat = np.asarray(matrix, dtype=complex)
    d = m * n
    if mat.shape != (d, d):
        raise ValueError(f"matrix shape {mat.shape} does not match dims ({m}, {n})")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix contains non-finite entries")
    if np.linalg.norm(mat - mat.conj().T) > herm_tol * (1.0 + np.linalg.norm(mat)):
        raise ValueError("matrix is not Hermitian within tolerance")
    if abs(np.trace(mat).real - 1.0) > trace_tol or abs(np.trace(mat).imag) > trace_tol:
        raise ValueError(f"trace is {np.trace(mat):.6g}, expected 1")
    if np.min(np.linalg.eigvalsh((mat + mat.conj().T) / 2)) < -psd_tol:
        raise ValueError("matrix has an eigenvalue below -psd_tol")
    return DensityMatrix(m=m, n=n, matrix=mat)


def bound_2x4() -> DensityMatrix:
    """The rank-5 PPT state on a 2x4 system used throughout the tests.

    Entries are 0 or 1/8, nonzero eigenvalues {1/4, 1/4, 1/4, 1/8, 1/8},
    positive partial transpose.  Often quoted as bound entangled (hence
    the name), but it is the separable endpoint of that family: mixing
    the five states (|0> + w^i |1>) x (|0> + w^-i |1> + w^-2i |2> +
    w^-3i |3>) with w = exp(2 pi i / 5) at equal weights reproduces it
    exactly, and classify finds such a decomposition.
    """
    rows = [
        [1, 0, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 1],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 1],
    ]
    return DensityMatrix(m=2, n=4, matrix=np.array(rows, dtype=complex) / 8.0)


def bound_2x4_basis() -> np.ndarray:
    """Canonical reference eigenbasis for bound_2x4, rows scaled to sqrt(eigenvalue).

    The 1/4 eigenspace of bound_2x4 is degenerate, so per-pair spectral
    matrices depend on the basis gauge; this fixed basis pins them down.
    """
    s = np.sqrt(1.0 / 8.0)
    x = np.zeros((5, 8))
    x[0, 3] = s
    x[1, 4] = s
    x[2, 0] = s
    x[2, 5] = s
    x[3, 1] = s
    x[3, 6] = s
    x[4, 2] = s
    x[4, 7] = s
    return x.astype(complex)


def bell() -> DensityMatrix:
    """|phi+><phi+| with |phi+> = (|00> + |11>)/sqrt(2) on 2x2."""
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return DensityMatrix(m=2, n=2, matrix=np.outer(v, v.conj()))


def werner_2x2(p: float) -> DensityMatrix:
    """p |psi-><psi-| + (1-p) I/4 with the singlet |psi-> = (|01> - |10>)/sqrt(2).

    Positive partial transpose (and separable) exactly for p <= 1/3.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    mat = p * np.outer(singlet, singlet.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(m=2, n=2, matrix=mat)


def isotropic(d: int, fidelity: float) -> DensityMatrix:
    """Isotropic state on d x d: fidelity F on |phi+>, the rest spread uniformly."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity}")
    phi = np.eye(d).reshape(-1).astype(complex) / np.sqrt(d)
    proj = np.outer(phi, phi.conj())
    mat = fidelity * proj + (1.0 - fidelity) * (np.eye(d * d) - proj) / (d * d - 1)
    return DensityMatrix(m=d, n=d, matrix=mat)


def product(rho_a, rho_b) -> DensityMatrix:
    """Kronecker product of two single-factor density matrices."""
    a = np.asarray(rho_a, dtype=complex)
    b = np.asarray(rho_b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("factors must be square matrices")
    return density_matrix(a.shape[0], b.shape[0], np.kron(a, b))


def random_density(m: int, n: int, rank: int | None = None, seed: int = 0) -> DensityMatrix:
    """Seeded random state: G G^dag normalized to unit trace, G complex Gaussian mn x rank."""
    d = m * n
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityMatrix(m=m, n=n, matrix=mat)


def random_separable(m: int, n: int, terms: int, seed: int) -> DensityMatrix:
    """Seeded random mixture of product pure states (Dirichlet weights)."""
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    mat = np.zeros((m * n, m * n), dtype=complex)
    for w in weights:
        alpha = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        beta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        alpha /= np.linalg.norm(alpha)
        beta /= np.linalg.norm(beta)
        psi = np.kron(alpha, beta)
        mat += w * np.outer(psi, psi.conj())
    return DensityMatrix(m=m, n=n, matrix=mat)


def format_float(x: float) -> str:
    """17-significant-digit decimal, enough for exact float64 round trips."""
    return f"{x:.17g}"


def serialize_state(rho: DensityMatrix) -> str:
    """Render a state in the line-oriented text format."""
    lines = [f"dims {rho.m} {rho.n}"]
    for row in rho.matrix:
        lines.append(" ".join(f"{format_float(z.real)},{format_float(z.imag)}" for z in row))
    return "\n".join(lines) + "\n"


def _parse_entry(token: str, lineno: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise StateFormatError(f"line {lineno}: expected 're,im', got {token!r}")
    try:
        re, im = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise StateFormatError(f"line {lineno}: bad number in {token!r}") from exc
    if not (np.isfinite(re) and np.isfinite(im)):
        raise StateFormatError(f"line {lineno}: non-finite entry {token!r}")
    return complex(re, im)


def parse_state(text: str) -> DensityMatrix:
    """Parse the text format; errors carry 1-based line numbers.

    Validates Hermiticity and unit trace (within 1e-8) of the payload.
    """
    lines = text.splitlines()
    if not lines:
        raise StateFormatError("line 1: empty input, expected 'dims m n' header")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "dims":
        raise StateFormatError(f"line 1: expected 'dims m n', got {lines[0]!r}")
    try:
        m, n = int(header[1]), int(header[2])
    except ValueError as exc:
        raise StateFormatError(f"line 1: non-integer dims in {lines[0]!r}") from exc
    if m < 1 or n < 1:
        raise StateFormatError(f"line 1: dims must be positive, got ({m}, {n})")
    d = m * n
    if len(lines) < 1 + d:
        raise StateFormatError(f"line {len(lines) + 1}: expected {d} matrix rows, found {len(lines) - 1}")
    for extra in range(1 + d, len(lines)):
        if lines[extra].strip():
            raise StateFormatError(f"line {extra + 1}: unexpected content after matrix rows")
    mat = np.zeros((d, d), dtype=complex)
    for i in range(d):
        lineno = i + 2
        tokens = lines[1 + i].split()
        if len(tokens) != d:
            raise StateFormatError(f"line {lineno}: expected {d} entries, got {len(tokens)}")
        for j, token in enumerate(tokens):
            mat[i, j] = _parse_entry(token, lineno)
    try:
        return density_matrix(m, n, mat)
    except ValueError as exc:
        raise StateFormatError(f"lines 2-{d + 1}: invalid density matrix: {exc}") from exc
