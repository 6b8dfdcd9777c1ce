"""Composite-system kernels: reduction by partial trace and admissibility.

A kernel for a bipartite N = n_a * n_b system is composite-admissible when,
on top of the master equations at dimension N, its partial traces are
themselves valid subsystem kernels:

    tr((Tr_B Delta)^2) = n_a,      tr((Tr_A Delta)^2) = n_b.

Subsystem Wigner functions are then obtained by pairing reduced states with
reduced kernels.  The admissible set has dimension n_a^2 n_b^2 - 4 (three
independent constraints on the N^2 - 1 dimensional traceless chart, plus
the unit trace).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    BipartiteDims,
    DensityMatrix,
    as_complex_matrix,
    hermiticity_defect,
    kron,
    partial_trace,
)
from .kernel import PURITY_TOL, MasterReport, SWKernel, hyperplane_frame, verify_master

__all__ = [
    "CompositeAdmissibilityError",
    "CompositeKernel",
    "CompositeReport",
    "FanoBlocks",
    "traceless_orthonormal_basis",
    "fano_blocks",
    "fano_blocks_compose",
    "block_norm_targets",
    "reduce_kernel",
    "subsystem_wigner",
    "verify_composite_master",
    "make_composite_kernel",
    "dual_dim",
    "constraint_functions",
    "constraint_jacobian",
]

ADMISSIBLE_TOL = 1e-10


class CompositeAdmissibilityError(ValueError):
    """Raised when a matrix fails the composite admissibility conditions.

    Carries both subsystem purity residuals.
    """

    def __init__(self, purity_a_residual: float, purity_b_residual: float):
        self.purity_a_residual = purity_a_residual
        self.purity_b_residual = purity_b_residual
        super().__init__(
            "composite admissibility violated: subsystem purity residuals "
            f"A={purity_a_residual:.3e}, B={purity_b_residual:.3e}"
        )


def traceless_orthonormal_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian traceless basis of d x d matrices, shape (d^2-1, d, d).

    Generalized Gell-Mann construction: symmetric pairs, antisymmetric
    pairs, then diagonal sum-zero directions; tr(F_i F_j) = delta_ij.
    """
    out = []
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = inv_sqrt2
            m[j, i] = inv_sqrt2
            out.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j * inv_sqrt2
            m[j, i] = 1j * inv_sqrt2
            out.append(m)
    for row in hyperplane_frame(d):
        out.append(np.diag(row).astype(complex))
    return np.stack(out)


@dataclass(frozen=True)
class FanoBlocks:
    """Block decomposition of a bipartite Hermitian matrix.

    Coefficients over the orthonormal product basis built from
    :func:`traceless_orthonormal_basis`: an identity coefficient, an A-local
    vector, a B-local vector and a correlation matrix.  Reassembly through
    :func:`fano_blocks_compose` reproduces the source matrix.
    """

    identity_coeff: float
    local_a: np.ndarray
    local_b: np.ndarray
    corr: np.ndarray
    dims: BipartiteDims


def fano_blocks(x, dims: BipartiteDims) -> FanoBlocks:
    """Project a Hermitian matrix onto identity / A-local / B-local / correlation blocks."""
    m = as_complex_matrix(x)
    dims.check(m.shape[0])
    if hermiticity_defect(m) > 1e-10:
        raise ValueError("input is not Hermitian")
    fa = traceless_orthonormal_basis(dims.n_a)
    fb = traceless_orthonormal_basis(dims.n_b)
    t = m.reshape(dims.n_a, dims.n_b, dims.n_a, dims.n_b)
    # tr(m (P ⊗ Q)) = sum_{ikjl} t[i,k,j,l] P[j,i] Q[l,k]
    identity_coeff = float(np.einsum("ikik->", t).real) / np.sqrt(dims.total)
    local_a = np.einsum("ikjk,aji->a", t, fa).real / np.sqrt(dims.n_b)
    local_b = np.einsum("ikil,blk->b", t, fb).real / np.sqrt(dims.n_a)
    corr = np.einsum("ikjl,aji,blk->ab", t, fa, fb).real
    return FanoBlocks(identity_coeff, local_a, local_b, corr, dims)


def fano_blocks_compose(blocks: FanoBlocks) -> np.ndarray:
    """Reassemble the matrix from its blocks."""
    dims = blocks.dims
    fa = traceless_orthonormal_basis(dims.n_a)
    fb = traceless_orthonormal_basis(dims.n_b)
    ia = np.eye(dims.n_a) / np.sqrt(dims.n_a)
    ib = np.eye(dims.n_b) / np.sqrt(dims.n_b)
    m = blocks.identity_coeff * kron(ia, ib)
    m += kron(np.einsum("a,aij->ij", blocks.local_a, fa), ib)
    m += kron(ia, np.einsum("b,bij->ij", blocks.local_b, fb))
    m += np.einsum("ab,aij,bkl->ikjl", blocks.corr, fa, fb).reshape(dims.total, dims.total)
    return m


def block_norm_targets(dims: BipartiteDims) -> tuple[float, float, float]:
    """Squared block norms forced by composite admissibility.

    In the orthonormal-basis sense: with N = n_a n_b,

        |local_a|^2 = (n_a^2 - 1) / N
        |local_b|^2 = (n_b^2 - 1) / N
        |corr|^2    = (n_a^2 - 1)(n_b^2 - 1) / N

    Three orthogonal blocks map one-to-one onto the three purity
    constraints, so the rescaling construction is well-posed.
    """
    n = dims.total
    ta = (dims.n_a**2 - 1.0) / n
    tb = (dims.n_b**2 - 1.0) / n
    tc = (dims.n_a**2 - 1.0) * (dims.n_b**2 - 1.0) / n
    return ta, tb, tc


@dataclass(frozen=True)
class CompositeKernel:
    """An SW kernel that is admissible for a given bipartition."""

    kernel: SWKernel
    dims: BipartiteDims

    def __post_init__(self):
        self.dims.check(self.kernel.n)
        report = verify_composite_master(self.kernel.mat, self.dims)
        if not report.admissible(ADMISSIBLE_TOL):
            raise CompositeAdmissibilityError(
                report.purity_a_residual, report.purity_b_residual
            )

    @property
    def mat(self) -> np.ndarray:
        return self.kernel.mat


@dataclass(frozen=True)
class CompositeReport:
    """Residuals of the full-system and subsystem-reduction conditions."""

    dims: BipartiteDims
    full: MasterReport
    purity_a_residual: float
    purity_b_residual: float

    def admissible(self, tol: float = ADMISSIBLE_TOL) -> bool:
        return (self.full.ok(tol)
                and self.purity_a_residual <= tol
                and self.purity_b_residual <= tol)

    def as_dict(self) -> dict:
        # Wire-format field names are part of the on-disk report schema.
        return {
            "dims": [self.dims.n_a, self.dims.n_b],
            "eq6": self.full.as_dict(),
            "eq8_a": self.purity_a_residual,
            "eq8_b": self.purity_b_residual,
            "admissible": self.admissible(),
        }


def verify_composite_master(x, dims: BipartiteDims,
                            tol: float = ADMISSIBLE_TOL) -> CompositeReport:
    """Report all four admissibility residuals for a candidate matrix."""
    m = as_complex_matrix(x)
    dims.check(m.shape[0])
    full = verify_master(m, dims.total, tol)
    ra = partial_trace(m, dims, keep="A")
    rb = partial_trace(m, dims, keep="B")
    res_a = abs(np.trace(ra @ ra).real - dims.n_a)
    res_b = abs(np.trace(rb @ rb).real - dims.n_b)
    return CompositeReport(dims, full, float(res_a), float(res_b))


def reduce_kernel(delta: CompositeKernel, keep: str = "A") -> SWKernel:
    """Partial-trace a composite kernel down to a subsystem kernel.

    The reduced matrix keeps unit trace, and composite admissibility makes
    its purity equal the subsystem dimension, so the result is a valid
    kernel for the subsystem.
    """
    report = verify_composite_master(delta.mat, delta.dims)
    if max(report.purity_a_residual, report.purity_b_residual) > ADMISSIBLE_TOL:
        raise CompositeAdmissibilityError(
            report.purity_a_residual, report.purity_b_residual
        )
    reduced = partial_trace(delta.mat, delta.dims, keep=keep)
    n = delta.dims.n_a if keep == "A" else delta.dims.n_b
    return SWKernel((reduced + reduced.conj().T) / 2.0, n)


def subsystem_wigner(rho_ab: DensityMatrix, delta: CompositeKernel,
                     keep: str = "A") -> float:
    """Wigner value of a reduced state: tr(Tr_B rho * Tr_B Delta) for keep="A".

    Equals the direct pairing tr(rho_ab (Delta_A ⊗ I)) by the partial-trace
    duality; the reduce-then-pair route is what is computed here.
    """
    dims = delta.dims
    dims.check(rho_ab.dim)
    rho_red = partial_trace(rho_ab.mat, dims, keep=keep)
    ker_red = partial_trace(delta.mat, dims, keep=keep)
    w = np.trace(rho_red @ ker_red)
    if abs(w.imag) > DEFAULT_TOL:
        raise ValueError(f"pairing has imaginary part {w.imag:.3e}")
    return float(w.real)


def make_composite_kernel(dims: BipartiteDims, seed, max_redraws: int = 100) -> CompositeKernel:
    """Random composite-admissible kernel by block rescaling.

    Draws a random Hermitian matrix, splits it into Fano blocks and rescales
    each traceless block to the norm forced by the admissibility
    constraints (only identity and A-local blocks survive Tr_B, and
    symmetrically).  Degenerate draws with a vanishing block are redrawn.
    """
    if dims.n_a < 2 or dims.n_b < 2:
        raise ValueError("composite kernels need n_a, n_b >= 2")
    rng = np.random.default_rng(seed)
    ta, tb, tc = block_norm_targets(dims)
    n = dims.total
    for _ in range(max_redraws):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2.0
        blocks = fano_blocks(h, dims)
        na = np.linalg.norm(blocks.local_a)
        nb = np.linalg.norm(blocks.local_b)
        nc = np.linalg.norm(blocks.corr)
        if min(na, nb, nc) < 1e-12:
            continue
        scaled = FanoBlocks(
            identity_coeff=1.0 / np.sqrt(n),
            local_a=blocks.local_a * (np.sqrt(ta) / na),
            local_b=blocks.local_b * (np.sqrt(tb) / nb),
            corr=blocks.corr * (np.sqrt(tc) / nc),
            dims=dims,
        )
        mat = fano_blocks_compose(scaled)
        mat = (mat + mat.conj().T) / 2.0
        return CompositeKernel(SWKernel(mat, n), dims)
    raise RuntimeError(f"no nondegenerate draw in {max_redraws} attempts")


def dual_dim(dims: BipartiteDims) -> int:
    """Dimension of the composite-admissible kernel set: n_a^2 n_b^2 - 4."""
    return dims.n_a**2 * dims.n_b**2 - 4


def constraint_functions(x, dims: BipartiteDims) -> np.ndarray:
    """The three purity constraints (full, A-reduced, B-reduced), as residual values."""
    m = as_complex_matrix(x)
    ra = partial_trace(m, dims, keep="A")
    rb = partial_trace(m, dims, keep="B")
    return np.array([
        np.trace(m @ m).real - dims.total,
        np.trace(ra @ ra).real - dims.n_a,
        np.trace(rb @ rb).real - dims.n_b,
    ])


def constraint_jacobian(x, dims: BipartiteDims, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the constraint map on the traceless chart.

    The chart is the orthonormal product basis of traceless Hermitian
    matrices at dimension N (N^2 - 1 directions).  Rank 3 of the returned
    (3, N^2 - 1) matrix confirms that the constraints cut out codimension 3.
    """
    m = as_complex_matrix(x)
    dims.check(m.shape[0])
    fa = traceless_orthonormal_basis(dims.n_a)
    fb = traceless_orthonormal_basis(dims.n_b)
    ia = np.eye(dims.n_a) / np.sqrt(dims.n_a)
    ib = np.eye(dims.n_b) / np.sqrt(dims.n_b)
    chart = [kron(f, ib) for f in fa]
    chart += [kron(ia, f) for f in fb]
    chart += [kron(f, g) for f in fa for g in fb]
    cols = []
    for direction in chart:
        plus = constraint_functions(m + step * direction, dims)
        minus = constraint_functions(m - step * direction, dims)
        cols.append((plus - minus) / (2.0 * step))
    return np.stack(cols, axis=1)
