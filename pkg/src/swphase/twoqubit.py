"""Two-qubit kernel geometry: Fano coordinates, su(4) structure, moduli bundle.

The traceless part of any two-qubit operator lives in the span of the 15
Pauli tensor products sigma_mu x sigma_nu.  This module fixes the
associated su(4) generator basis, splits it into two commuting su(2)
triples, two abelian 3-planes and a maximal torus, and builds the
machinery that turns the composite admissibility constraints into a bundle
of a unit 2-sphere and two ellipsoids over the abelian group factor: the
adjoint 15x15 rotation, the ellipsoid matrices, their characteristic
cubics and root-sign classification, and a numerical solver for points
where sphere and both ellipsoids meet.

Convention pin
--------------
A single tag governs the Fano parametrizations: "HS2" means basis elements
sigma_{mu nu} / sqrt(2) (Hilbert-Schmidt norm sqrt(2)); "HS4" means plain
sigma_{mu nu} (norm 2).  The library pins HS2 because it makes the
elementary sum rule |eta_A|^2 + |eta_B|^2 + tr(E E^T) = 1 equivalent to
the purity condition tr(Delta^2) = 4, and makes the moduli-sphere kernel
construction land exactly on purity 4.  Block-norm values quoted in the
literature for the alternative normalization are reported side by side by
:func:`convention_report`, never silently adopted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import DEFAULT_TOL, as_complex_matrix, hermiticity_defect, mat_exp
from .kernel import SWKernel

__all__ = [
    "STATE_COEFF",
    "KERNEL_COEFF",
    "SIGMA",
    "FANO_ORDER",
    "LambdaBasis",
    "build_lambda_basis",
    "FanoForm",
    "fano_decompose",
    "fano_compose",
    "elementary_constraint_value",
    "TwoQubitBlockReport",
    "twoqubit_constraint_values",
    "KakElement",
    "kak_element",
    "adjoint_matrix",
    "QuadricTriple",
    "ellipsoid_matrices",
    "RootReport",
    "char_cubic_roots",
    "kernel_from_moduli",
    "fibonacci_sphere",
    "FeasibilityResult",
    "MATRIX_LEVEL",
    "moduli_feasibility",
    "isotropy_dim",
    "ScanRecord",
    "moduli_record",
    "moduli_scan",
    "SCAN_CSV_COLUMNS",
    "scan_to_csv",
    "scan_to_json",
    "solid_overlap_oracle",
    "torus_factor_dependence",
    "cross_commutator_report",
    "convention_report",
]

STATE_COEFF = np.sqrt(6.0) / 4.0
KERNEL_COEFF = np.sqrt(30.0) / 4.0

_P0 = np.eye(2, dtype=complex)
_P1 = np.array([[0, 1], [1, 0]], dtype=complex)
_P2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_P3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([_P0, _P1, _P2, _P3])

# Listing order of the 15 traceless Fano labels (mu, nu); entry m hosts
# generator number m + 1.
FANO_ORDER = (
    (1, 0), (2, 0), (3, 0),
    (0, 1), (0, 2), (0, 3),
    (1, 1), (1, 2), (1, 3),
    (2, 1), (2, 2), (2, 3),
    (3, 1), (3, 2), (3, 3),
)

SIGMA = np.stack([np.kron(PAULI[m], PAULI[n]) for m, n in FANO_ORDER])
_LAMBDA = 0.5j * SIGMA

# Torus directions (sigma_30, sigma_03, sigma_33) and the local column
# blocks, as zero-based positions into FANO_ORDER.
_TORUS_ROWS = (2, 5, 14)
_A_COLS = (0, 1, 2)
_B_COLS = (3, 4, 5)


@dataclass(frozen=True)
class LambdaBasis:
    """The 15 su(4) generators (i/2) sigma_{mu nu} and their subalgebra split.

    Index tuples are one-based generator numbers in the listing order of
    ``FANO_ORDER``.  ``k_signed`` records the signs that make the twisted
    su(2) + su(2) triples close among themselves.
    """

    lambdas: np.ndarray
    a_indices: tuple = (11, 9, 13)
    a_prime_indices: tuple = (4, 1, 7)
    k_prime_indices: tuple = (3, 6, 15)
    k_signed: tuple = ((-1, 14), (1, 2), (-1, 8), (-1, 5), (1, 12), (-1, 10))
    lu_local_indices: tuple = (1, 2, 3, 4, 5, 6)

    def span(self, indices) -> np.ndarray:
        """Stack of generators for one-based ``indices``."""
        return self.lambdas[[i - 1 for i in indices]]

    @property
    def a_generators(self) -> np.ndarray:
        return self.span(self.a_indices)

    @property
    def a_prime_generators(self) -> np.ndarray:
        return self.span(self.a_prime_indices)

    @property
    def k_prime_generators(self) -> np.ndarray:
        return self.span(self.k_prime_indices)

    @property
    def k_generators(self) -> np.ndarray:
        signs = np.array([s for s, _ in self.k_signed], dtype=complex)
        idx = [i - 1 for _, i in self.k_signed]
        return signs[:, None, None] * self.lambdas[idx]

    @property
    def local_generators(self) -> np.ndarray:
        return self.span(self.lu_local_indices)


def build_lambda_basis() -> LambdaBasis:
    """Construct the generator basis; -tr(l_i l_j) = delta_ij."""
    return LambdaBasis(lambdas=_LAMBDA.copy())


@dataclass(frozen=True)
class FanoForm:
    """Bloch-vector parametrization of a two-qubit Hermitian matrix.

    x = identity_coeff * I_4
        + coeff * (xi_a . basis_A + xi_b . basis_B + corr_ij basis_i x basis_j)

    where the basis elements are sigma_{mu nu} / sqrt(2) under the "HS2"
    tag and plain sigma_{mu nu} under "HS4".
    """

    xi_a: np.ndarray
    xi_b: np.ndarray
    corr: np.ndarray
    coeff: float
    basis_norm: str
    identity_coeff: float


def _basis_scale(basis_norm: str) -> float:
    if basis_norm == "HS2":
        return np.sqrt(2.0)
    if basis_norm == "HS4":
        return 1.0
    raise ValueError(f"basis_norm must be 'HS2' or 'HS4', got {basis_norm!r}")


def fano_decompose(x, coeff: float = STATE_COEFF, basis_norm: str = "HS2") -> FanoForm:
    """Extract Fano coordinates of a Hermitian 4x4 matrix by projection.

    Parameters
    ----------
    x : array_like
        Hermitian 4x4 matrix (defect beyond 1e-10 is rejected).
    coeff : float
        Overall scale in front of the traceless part; sqrt(6)/4 for states,
        sqrt(30)/4 for kernels.
    basis_norm : {"HS2", "HS4"}
        Normalization tag for the basis elements.
    """
    m = as_complex_matrix(x)
    if m.shape[0] != 4:
        raise ValueError("Fano decomposition is for 4x4 matrices")
    if hermiticity_defect(m) > 1e-10:
        raise ValueError("input is not Hermitian")
    s = _basis_scale(basis_norm)
    raw = np.einsum("mab,ba->m", SIGMA, m).real / 4.0
    coords = raw * (s / coeff)
    return FanoForm(
        xi_a=coords[0:3],
        xi_b=coords[3:6],
        corr=coords[6:15].reshape(3, 3),
        coeff=float(coeff),
        basis_norm=basis_norm,
        identity_coeff=float(np.trace(m).real / 4.0),
    )


def fano_compose(form: FanoForm) -> np.ndarray:
    """Reassemble the matrix from Fano coordinates."""
    s = _basis_scale(form.basis_norm)
    coords = np.concatenate([form.xi_a, form.xi_b, form.corr.reshape(-1)])
    traceless = np.einsum("m,mab->ab", coords, SIGMA) / s
    return form.identity_coeff * np.eye(4, dtype=complex) + form.coeff * traceless


def elementary_constraint_value(delta_fano: FanoForm) -> float:
    """Sum rule S = |eta_A|^2 + |eta_B|^2 + tr(E E^T) for a kernel Fano form.

    Under the pinned HS2 convention with kernel coefficient sqrt(30)/4,
    S = 1 is equivalent to the purity condition tr(Delta^2) = 4.
    """
    if abs(delta_fano.coeff - KERNEL_COEFF) > 1e-12:
        raise ValueError("Fano form was not built with the kernel coefficient")
    return float(
        delta_fano.xi_a @ delta_fano.xi_a
        + delta_fano.xi_b @ delta_fano.xi_b
        + np.sum(delta_fano.corr**2)
    )


@dataclass(frozen=True)
class TwoQubitBlockReport:
    """Measured Fano block norms of a two-qubit kernel and their targets.

    ``matrix_residuals`` holds |tr(Delta^2) - 4| and the two subsystem
    purity residuals |tr((Tr_B Delta)^2) - 2|, |tr((Tr_A Delta)^2) - 2|;
    these matrix-level values are the authoritative admissibility check.
    The block targets are one-time derivations, hard-coded (see
    :func:`twoqubit_constraint_values`).
    """

    measured: tuple
    targets_pinned: tuple
    targets_hs4: tuple
    literature_values: tuple
    matrix_residuals: tuple

    def as_dict(self) -> dict:
        return {
            "measured_hs2": list(self.measured),
            "targets_hs2": list(self.targets_pinned),
            "targets_hs4": list(self.targets_hs4),
            "literature_values": list(self.literature_values),
            "matrix_residuals": {
                "purity": self.matrix_residuals[0],
                "eq8_a": self.matrix_residuals[1],
                "eq8_b": self.matrix_residuals[2],
            },
        }


def twoqubit_constraint_values(delta) -> TwoQubitBlockReport:
    """Measured block norms of a candidate two-qubit kernel vs. derived targets.

    Derivation of the hard-coded targets: in the orthonormal (HS-norm-1)
    product basis, composite admissibility at (2, 2) forces squared block
    weights 3/4, 3/4, 9/4 for the A-local, B-local and correlation blocks
    (subsystem purity 2 each, total purity 4).  A Fano block written as
    coeff * eta . (sigma / s) carries orthonormal weight
    (coeff^2 * 4 / s^2) |eta|^2, so with coeff = sqrt(30)/4:

        HS2 (s = sqrt(2)):  (15/4) |eta|^2  ->  targets (1/5, 1/5, 3/5)
        HS4 (s = 1):        (15/2) |eta|^2  ->  targets (1/10, 1/10, 3/10)

    The literature triple (1/10, 1/10, 4/5) for this parametrization sums
    to 1 like the HS2 triple but matches neither uniform normalization;
    it is reported, not adopted.
    """
    m = as_complex_matrix(delta)
    if m.shape[0] != 4:
        raise ValueError("expected a 4x4 matrix")
    if hermiticity_defect(m) > 1e-10:
        raise ValueError("input is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"kernel trace {tr} != 1")
    form = fano_decompose(m, coeff=KERNEL_COEFF, basis_norm="HS2")
    measured = (
        float(form.xi_a @ form.xi_a),
        float(form.xi_b @ form.xi_b),
        float(np.sum(form.corr**2)),
    )
    t = m.reshape(2, 2, 2, 2)
    red_a = np.einsum("ikjk->ij", t)
    red_b = np.einsum("kikj->ij", t)
    residuals = (
        float(abs(np.trace(m @ m).real - 4.0)),
        float(abs(np.trace(red_a @ red_a).real - 2.0)),
        float(abs(np.trace(red_b @ red_b).real - 2.0)),
    )
    return TwoQubitBlockReport(
        measured=measured,
        targets_pinned=(0.2, 0.2, 0.6),
        targets_hs4=(0.1, 0.1, 0.3),
        literature_values=(0.1, 0.1, 0.8),
        matrix_residuals=residuals,
    )


@dataclass(frozen=True)
class KakElement:
    """Group element factored as g = K * A * T.

    K exponentiates the twisted su(2)+su(2) block, A is the ordered product
    exp(a-block) exp(a'-block) of the two abelian 3-planes, T lies in the
    maximal torus.  All factors are special unitary.
    """

    k_params: np.ndarray
    a_params: np.ndarray
    a_prime_params: np.ndarray
    t_params: np.ndarray
    factor_k: np.ndarray
    factor_a: np.ndarray
    factor_t: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return self.factor_k @ self.factor_a @ self.factor_t


def _exp_span(params, generators) -> np.ndarray:
    return mat_exp(np.einsum("i,iab->ab", np.asarray(params, dtype=float), generators))


def kak_element(k_params, a_params, a_prime_params, t_params) -> KakElement:
    """Build the factored group element from real coordinates.

    ``k_params`` has length 6, the others length 3.  The A factor is
    exp(a) exp(a') exactly in that order; the two exponentials do not
    commute with each other even though each 3-plane is abelian.
    """
    lb = build_lambda_basis()
    k_params = np.asarray(k_params, dtype=float)
    a_params = np.asarray(a_params, dtype=float)
    a_prime_params = np.asarray(a_prime_params, dtype=float)
    t_params = np.asarray(t_params, dtype=float)
    if k_params.shape != (6,) or a_params.shape != (3,) \
            or a_prime_params.shape != (3,) or t_params.shape != (3,):
        raise ValueError("expected parameter shapes (6,), (3,), (3,), (3,)")
    factor_k = _exp_span(k_params, lb.k_generators)
    factor_a = _exp_span(a_params, lb.a_generators) @ _exp_span(
        a_prime_params, lb.a_prime_generators)
    factor_t = _exp_span(t_params, lb.k_prime_generators)
    return KakElement(k_params, a_params, a_prime_params, t_params,
                      factor_k, factor_a, factor_t)


def adjoint_matrix(a) -> np.ndarray:
    """Adjoint action of a unitary on the generator basis, as a real 15x15 matrix.

    Entries O[m, n] = -tr(a l_n a^dagger l_m), i.e. column n holds the
    coordinates of a l_n a^dagger, so coefficient vectors transform as
    x -> O x and adjoint(a1 a2) = adjoint(a1) adjoint(a2).  O is orthogonal.
    """
    am = as_complex_matrix(a)
    if am.shape[0] != 4:
        raise ValueError("expected a 4x4 unitary")
    if np.linalg.norm(am @ am.conj().T - np.eye(4)) > DEFAULT_TOL:
        raise ValueError("input is not unitary")
    rotated = am @ _LAMBDA @ am.conj().T
    o = -np.einsum("nab,mba->mn", rotated, _LAMBDA)
    if np.max(np.abs(o.imag)) > 1e-12:
        raise ValueError("adjoint matrix came out non-real")
    o = o.real
    if np.linalg.norm(o @ o.T - np.eye(15)) > 1e-11:
        raise ValueError("adjoint matrix is not orthogonal")
    return o


@dataclass(frozen=True)
class QuadricTriple:
    """Ellipsoid matrices of the moduli bundle over torus coordinates.

    ``a`` and ``b`` are symmetric positive-semidefinite 3x3 matrices with
    eigenvalues <= 4/3; together with the unit sphere they define the
    admissibility locus in the coordinates named by ``mu_labels``.
    """

    a: np.ndarray
    b: np.ndarray
    mu_labels: tuple = ("mu3", "mu6", "mu15")

    def __post_init__(self):
        for name, m in (("a", self.a), ("b", self.b)):
            arr = np.asarray(m, dtype=float)
            if arr.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3")
            if np.linalg.norm(arr - arr.T) > 1e-13:
                raise ValueError(f"{name} is not symmetric")
            if np.linalg.eigvalsh(arr)[0] < -1e-10:
                raise ValueError(f"{name} is not positive semidefinite")
            object.__setattr__(self, name, arr)


def ellipsoid_matrices(o) -> QuadricTriple:
    """Ellipsoid matrices from the adjoint rotation.

    With S the sub-block of O taking torus coordinates (generator numbers
    3, 6, 15, in that order) to the A-local coordinates (numbers 1..3),
    A := (4/3) S^T S; B likewise over the B-local rows (numbers 4..6).
    Entry [alpha, beta] is (4/3) times the A-local overlap of the rotated
    torus directions alpha and beta.
    """
    om = np.asarray(o, dtype=float)
    if om.shape != (15, 15):
        raise ValueError("expected a 15x15 adjoint matrix")
    sub_a = om[np.ix_(_A_COLS, _TORUS_ROWS)]
    sub_b = om[np.ix_(_B_COLS, _TORUS_ROWS)]
    qa = (4.0 / 3.0) * (sub_a.T @ sub_a)
    qb = (4.0 / 3.0) * (sub_b.T @ sub_b)
    qa = (qa + qa.T) / 2.0
    qb = (qb + qb.T) / 2.0
    return QuadricTriple(a=qa, b=qb)


@dataclass(frozen=True)
class RootReport:
    """Roots of the three characteristic cubics and the overlap verdict.

    roots_sphere_a/b are the roots of det(t I + A) resp. det(t I + B);
    roots_ab those of det(t A + B).  A rank-deficient leading matrix marks
    the record degenerate and routes the pencil through a polynomial
    fallback (``ab_degenerate``).  classification follows the root-sign
    criterion: overlap iff no cubic has a root above +tol_root.
    """

    roots_sphere_a: np.ndarray
    roots_sphere_b: np.ndarray
    roots_ab: np.ndarray
    rank_a: int
    rank_b: int
    ab_degenerate: bool
    classification: str


def _det_poly_roots(qa: np.ndarray, qb: np.ndarray) -> np.ndarray:
    """Finite roots of det(t qa + qb) via exact cubic interpolation."""
    ts = np.array([-2.0, -1.0, 0.0, 1.0])
    vals = np.array([np.linalg.det(t * qa + qb) for t in ts])
    coeffs = np.linalg.solve(np.vander(ts, 4), vals)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return np.array([], dtype=complex)
    trimmed = np.trim_zeros(np.where(np.abs(coeffs) > 1e-12 * scale, coeffs, 0.0), "f")
    if trimmed.size < 2:
        return np.array([], dtype=complex)
    return np.roots(trimmed)


def char_cubic_roots(q: QuadricTriple, tol_root: float = 1e-9,
                     cond_floor: float = 1e-8) -> RootReport:
    """Roots of the three characteristic cubics and the overlap classification.

    det(t I + A) has roots -eig(A), likewise for B.  det(t A + B) is solved
    through the symmetric-definite pencil when A is positive definite
    (smallest eigenvalue above ``cond_floor``); otherwise the record is
    degenerate and a direct polynomial fallback reports the finite roots.
    """
    eig_a = np.linalg.eigvalsh(q.a)
    eig_b = np.linalg.eigvalsh(q.b)
    rank_a = int(np.sum(eig_a > cond_floor))
    rank_b = int(np.sum(eig_b > cond_floor))
    degenerate = rank_a < 3 or rank_b < 3
    if eig_a[0] > cond_floor:
        gen = scipy.linalg.eigh(q.b, q.a, eigvals_only=True)
        roots_ab = (-np.asarray(gen)).astype(complex)
        ab_degenerate = False
    else:
        roots_ab = _det_poly_roots(q.a, q.b)
        ab_degenerate = True
    if degenerate:
        classification = "degenerate"
    else:
        all_roots = np.concatenate([-eig_a, -eig_b, roots_ab.real])
        classification = "no_overlap" if np.any(all_roots > tol_root) else "overlap"
    return RootReport(
        roots_sphere_a=(-eig_a).astype(complex),
        roots_sphere_b=(-eig_b).astype(complex),
        roots_ab=roots_ab,
        rank_a=rank_a,
        rank_b=rank_b,
        ab_degenerate=ab_degenerate,
        classification=classification,
    )


def kernel_from_moduli(u, mu) -> SWKernel:
    """Two-qubit kernel from a unitary and a unit vector of torus coordinates.

    4 Delta = U (I + sqrt(15) (mu_1 sigma_30 + mu_2 sigma_03
    + mu_3 sigma_33)) U^dagger.  The sqrt(15) scale is the HS2-pinned
    rewrite of the sqrt(30)-scaled generator expansion over plain Pauli
    products; it is the unique scale for which unit-sphere mu gives
    purity exactly 4.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (3,):
        raise ValueError("mu must be a real 3-vector")
    if abs(np.linalg.norm(mu) - 1.0) > DEFAULT_TOL:
        raise ValueError(f"mu must be a unit vector, got norm {np.linalg.norm(mu)}")
    um = as_complex_matrix(u)
    if um.shape[0] != 4:
        raise ValueError("expected a 4x4 unitary")
    if np.linalg.norm(um @ um.conj().T - np.eye(4)) > DEFAULT_TOL:
        raise ValueError("u is not unitary")
    core = np.eye(4, dtype=complex) + np.sqrt(15.0) * (
        mu[0] * SIGMA[_TORUS_ROWS[0]]
        + mu[1] * SIGMA[_TORUS_ROWS[1]]
        + mu[2] * SIGMA[_TORUS_ROWS[2]]
    )
    mat = (um @ core @ um.conj().T) / 4.0
    mat = (mat + mat.conj().T) / 2.0
    return SWKernel(mat, 4)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic quasi-uniform grid of n points on the unit 2-sphere."""
    i = np.arange(n)
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = 2.0 * np.pi * i / golden
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def _tangent_frame(mu: np.ndarray):
    axis = np.zeros(3)
    axis[np.argmin(np.abs(mu))] = 1.0
    e1 = np.cross(mu, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(mu, e1)
    return e1, e2


def _newton_on_sphere(q: QuadricTriple, start: np.ndarray, level: float,
                      max_iter: int):
    """Newton refinement of the two ellipsoid equations on the unit sphere.

    Orthographic chart at the current point; returns the refined point or
    None when the 2x2 tangent system is singular or iteration stalls.
    """
    mu = start / np.linalg.norm(start)
    for _ in range(max_iter):
        e1, e2 = _tangent_frame(mu)
        grad_a = 2.0 * (q.a @ mu)
        grad_b = 2.0 * (q.b @ mu)
        jac = np.array([[grad_a @ e1, grad_a @ e2],
                        [grad_b @ e1, grad_b @ e2]])
        f = np.array([mu @ q.a @ mu - level, mu @ q.b @ mu - level])
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        mu = mu + step[0] * e1 + step[1] * e2
        mu /= np.linalg.norm(mu)
        if np.linalg.norm(step) < 1e-12:
            break
    return mu


@dataclass(frozen=True)
class FeasibilityResult:
    """Solutions of the sphere-plus-two-ellipsoids system, with the verdict."""

    solutions: list
    classification: str

    @property
    def n_solutions(self) -> int:
        return len(self.solutions)


# Right-hand side of the ellipsoid equations that reproduces the
# matrix-level reduction constraints exactly: with A = (4/3) S^T S the
# subsystem purity condition reads mu A mu^T = 4/15, not 1 (the 4/3-scaled
# bundle with unit level is infeasible outright, since A + B <= (4/3) I
# forces mu A mu^T + mu B mu^T <= 4/3 < 2 on the sphere).
MATRIX_LEVEL = 4.0 / 15.0


def moduli_feasibility(q: QuadricTriple, level: float = 1.0, n_grid: int = 2048,
                       residual_tol: float = 1e-10, dedup_tol: float = 1e-8,
                       max_iter: int = 50, max_starts: int = 48) -> FeasibilityResult:
    """Solve mu mu^T = 1, mu A mu^T = level, mu B mu^T = level numerically.

    Dense Fibonacci-grid sampling of the sphere brackets the zero sets of
    both ellipsoid residuals; the best bracket points seed Newton
    refinement in an orthographic tangent chart.  Distinct converged points
    (pairwise distance above ``dedup_tol``) with all residuals below
    ``residual_tol`` are returned.  Solutions come in antipodal pairs; both
    members are reported since they generate different kernels.

    The default ``level`` is the quoted unit normalization; pass
    ``MATRIX_LEVEL`` to solve the system equivalent to the matrix-level
    subsystem purity conditions (solutions then generate
    composite-admissible kernels through :func:`kernel_from_moduli`).
    """
    if level <= 0.0:
        raise ValueError("level must be positive")
    classification = char_cubic_roots(q).classification
    pts = fibonacci_sphere(n_grid)
    ga = np.einsum("pi,ij,pj->p", pts, q.a, pts) - level
    gb = np.einsum("pi,ij,pj->p", pts, q.b, pts) - level
    # Each surface must actually meet the sphere; a one-sided residual on a
    # dense grid (beyond small slack for near-tangency) rules that out.
    slack = 1e-3
    if ga.min() > slack or ga.max() < -slack or gb.min() > slack or gb.max() < -slack:
        return FeasibilityResult(solutions=[], classification=classification)
    score = np.maximum(np.abs(ga), np.abs(gb))
    order = np.argsort(score)[:max_starts]
    solutions: list[np.ndarray] = []
    for idx in order:
        mu = _newton_on_sphere(q, pts[idx], level, max_iter)
        if mu is None:
            continue
        res = max(abs(mu @ q.a @ mu - level), abs(mu @ q.b @ mu - level))
        if res > residual_tol:
            continue
        if any(np.linalg.norm(mu - s) <= dedup_tol for s in solutions):
            continue
        solutions.append(mu)
    return FeasibilityResult(solutions=solutions, classification=classification)


_ALGEBRA_CHOICES = ("lu_local", "full_su4", "k_twisted")


def isotropy_dim(delta, algebra: str = "lu_local") -> int:
    """Dimension of the subalgebra commuting with a Hermitian matrix.

    Builds X -> [X, delta] on the chosen generator span (6-dimensional
    local block, full 15-dimensional algebra, or the twisted 6-dimensional
    su(2)+su(2)) and counts singular values below 1e-9.  The orbit
    (phase-space) dimension is dim(algebra) minus this number.
    """
    m = as_complex_matrix(delta)
    if m.shape[0] != 4:
        raise ValueError("expected a 4x4 matrix")
    if hermiticity_defect(m) > 1e-10:
        raise ValueError("input is not Hermitian")
    lb = build_lambda_basis()
    if algebra == "lu_local":
        gens = lb.local_generators
    elif algebra == "full_su4":
        gens = lb.lambdas
    elif algebra == "k_twisted":
        gens = lb.k_generators
    else:
        raise ValueError(f"algebra must be one of {_ALGEBRA_CHOICES}")
    comm = gens @ m - m @ gens
    flat = comm.reshape(len(gens), -1)
    stacked = np.concatenate([flat.real, flat.imag], axis=1)
    svals = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(svals < 1e-9))


@dataclass(frozen=True)
class ScanRecord:
    """One moduli-scan draw: abelian parameters, quadrics, roots, solutions."""

    record_index: int
    a_params: np.ndarray
    a_prime_params: np.ndarray
    quadrics: QuadricTriple
    roots: RootReport
    feasibility: FeasibilityResult

    @property
    def classification(self) -> str:
        return self.roots.classification

    @property
    def n_solutions(self) -> int:
        return self.feasibility.n_solutions


def moduli_record(record_index: int, a_params, a_prime_params,
                  solve: bool = True, n_grid: int = 2048) -> ScanRecord:
    """Evaluate one moduli point: build the abelian factor and analyze its bundle."""
    lb = build_lambda_basis()
    factor = _exp_span(a_params, lb.a_generators) @ _exp_span(
        a_prime_params, lb.a_prime_generators)
    o = adjoint_matrix(factor)
    q = ellipsoid_matrices(o)
    roots = char_cubic_roots(q)
    if solve:
        feas = moduli_feasibility(q, n_grid=n_grid)
    else:
        feas = FeasibilityResult(solutions=[], classification=roots.classification)
    return ScanRecord(
        record_index=record_index,
        a_params=np.asarray(a_params, dtype=float),
        a_prime_params=np.asarray(a_prime_params, dtype=float),
        quadrics=q,
        roots=roots,
        feasibility=feas,
    )


def moduli_scan(n: int, seed, ranges=(-np.pi, np.pi),
                zero_params: bool = False, n_grid: int = 2048) -> list:
    """Random scan of the moduli bundle.

    Each record draws the two abelian parameter triples uniformly from
    ``ranges`` using a child seed spawned from (seed, record index), so the
    scan is reproducible and records are independent (safe to fan out).
    ``zero_params`` pins every draw to the origin instead.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = float(ranges[0]), float(ranges[1])
    if not hi > lo:
        raise ValueError("ranges must satisfy lo < hi")
    children = np.random.SeedSequence(seed).spawn(n)
    records = []
    for idx in range(n):
        if zero_params:
            a = np.zeros(3)
            ap = np.zeros(3)
        else:
            rng = np.random.default_rng(children[idx])
            a = rng.uniform(lo, hi, 3)
            ap = rng.uniform(lo, hi, 3)
        records.append(moduli_record(idx, a, ap, n_grid=n_grid))
    return records


SCAN_CSV_COLUMNS = (
    "record_index", "a1", "a2", "a3", "ap1", "ap2", "ap3",
    "rank_A", "rank_B",
    "eigA1", "eigA2", "eigA3", "eigB1", "eigB2", "eigB3",
    "rootsAB", "classification", "n_solutions", "solutions",
)


def _fmt_root(r: complex) -> str:
    if abs(r.imag) < 1e-12:
        return repr(float(r.real))
    return repr(complex(r))


def scan_record_row(rec: ScanRecord) -> list:
    eig_a = np.sort(np.linalg.eigvalsh(rec.quadrics.a))[::-1]
    eig_b = np.sort(np.linalg.eigvalsh(rec.quadrics.b))[::-1]
    roots_ab = ";".join(_fmt_root(r) for r in rec.roots.roots_ab)
    sols = ";".join(" ".join(repr(float(c)) for c in s)
                    for s in rec.feasibility.solutions)
    return (
        [rec.record_index]
        + [repr(float(v)) for v in rec.a_params]
        + [repr(float(v)) for v in rec.a_prime_params]
        + [rec.roots.rank_a, rec.roots.rank_b]
        + [repr(float(v)) for v in eig_a]
        + [repr(float(v)) for v in eig_b]
        + [roots_ab, rec.classification, rec.n_solutions, sols]
    )


def scan_to_csv(records, stream):
    """Write scan records as CSV with the fixed column contract."""
    import csv

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCAN_CSV_COLUMNS)
    for rec in records:
        writer.writerow(scan_record_row(rec))


def scan_to_json(records) -> list:
    """JSON mirror of the CSV dataset (same fields, structured values)."""
    out = []
    for rec in records:
        eig_a = np.sort(np.linalg.eigvalsh(rec.quadrics.a))[::-1]
        eig_b = np.sort(np.linalg.eigvalsh(rec.quadrics.b))[::-1]
        out.append({
            "record_index": rec.record_index,
            "a_params": [float(v) for v in rec.a_params],
            "ap_params": [float(v) for v in rec.a_prime_params],
            "rank_A": rec.roots.rank_a,
            "rank_B": rec.roots.rank_b,
            "eig_A": [float(v) for v in eig_a],
            "eig_B": [float(v) for v in eig_b],
            "roots_AB": [[float(r.real), float(r.imag)] for r in rec.roots.roots_ab],
            "classification": rec.classification,
            "n_solutions": rec.n_solutions,
            "solutions": [[float(c) for c in s] for s in rec.feasibility.solutions],
        })
    return out


def solid_overlap_oracle(q: QuadricTriple, n_points: int = 100_000,
                         tol: float = 1e-9, points: np.ndarray | None = None) -> str:
    """Brute-force overlap verdict from sampled quadric values.

    Searches for common points of each pair of solids (unit ball, ellipsoid
    interiors) using surface samples only: sphere directions nu give sphere
    points directly and ellipsoid surface points nu / sqrt(q(nu)).  A pair
    overlaps when some sample of one surface lies inside (or within ``tol``
    of) the other solid; "overlap" requires all three pairs to overlap.
    Independent of the characteristic-root path: no eigensolver, only
    quadratic-form evaluations.  Near-tangent configurations are the one
    regime where the search can miss a witness.
    """
    pts = fibonacci_sphere(n_points) if points is None else points
    qa = np.einsum("pi,ij,pj->p", pts, q.a, pts)
    qb = np.einsum("pi,ij,pj->p", pts, q.b, pts)
    up = 1.0 + tol
    lo = 1.0 / (1.0 + tol)
    # sphere surface inside the ellipsoid solid, or ellipsoid surface
    # (radius 1/sqrt(q)) inside the closed unit ball
    pair_sa = bool(np.any(qa <= up) or np.any(qa >= lo))
    pair_sb = bool(np.any(qb <= up) or np.any(qb >= lo))
    # E_A surface sample inside E_B solid: q_b/q_a <= 1, and vice versa
    safe_a = qa > tol
    safe_b = qb > tol
    pair_ab = bool(
        np.any(qb[safe_a] <= up * qa[safe_a])
        or np.any(qa[safe_b] <= up * qb[safe_b])
    )
    return "overlap" if (pair_sa and pair_sb and pair_ab) else "no_overlap"


def torus_factor_dependence(a_params, a_prime_params, mu, n_draws: int = 16,
                            seed=0) -> dict:
    """Measure how the K and T factors move the composite residuals.

    The bundle construction keeps only the abelian factor of the full
    K * A * T decomposition.  This experiment fixes (A, mu), conjugates by
    random K and T factors, and reports the maximum change of the two
    subsystem purity values.  Torus invariance is an identity (diagonal
    factors commute with the diagonal seed); the K dependence is a measured
    number, reported rather than assumed to vanish.
    """
    from .composite import verify_composite_master
    from .linalg import BipartiteDims

    dims = BipartiteDims(2, 2)
    lb = build_lambda_basis()
    factor_a = _exp_span(a_params, lb.a_generators) @ _exp_span(
        a_prime_params, lb.a_prime_generators)
    base = kernel_from_moduli(factor_a, mu)
    base_rep = verify_composite_master(base.mat, dims)
    rng = np.random.default_rng(seed)
    max_t_shift = 0.0
    max_k_shift = 0.0
    for _ in range(n_draws):
        t = _exp_span(rng.uniform(-np.pi, np.pi, 3), lb.k_prime_generators)
        rep = verify_composite_master(
            kernel_from_moduli(factor_a @ t, mu).mat, dims)
        max_t_shift = max(
            max_t_shift,
            abs(rep.purity_a_residual - base_rep.purity_a_residual),
            abs(rep.purity_b_residual - base_rep.purity_b_residual),
        )
        k = _exp_span(rng.uniform(-np.pi, np.pi, 6), lb.k_generators)
        rep = verify_composite_master(
            kernel_from_moduli(k @ factor_a, mu).mat, dims)
        max_k_shift = max(
            max_k_shift,
            abs(rep.purity_a_residual - base_rep.purity_a_residual),
            abs(rep.purity_b_residual - base_rep.purity_b_residual),
        )
    return {
        "base_purity_a_residual": base_rep.purity_a_residual,
        "base_purity_b_residual": base_rep.purity_b_residual,
        "max_torus_shift": max_t_shift,
        "max_k_shift": max_k_shift,
        "n_draws": n_draws,
    }


def cross_commutator_report() -> dict:
    """Numerically locate the span of commutators between the two abelian planes.

    Returns the dimension of span{[a', a]} and the Frobenius weight of its
    projection onto the twisted block, the torus, the abelian planes and
    the local block.  Reported, not asserted: no target is guessed for
    where these commutators must land.
    """
    lb = build_lambda_basis()
    comms = []
    for x in lb.a_prime_generators:
        for y in lb.a_generators:
            comms.append(x @ y - y @ x)
    comms = np.stack(comms)
    coeff = -np.einsum("cab,mba->cm", comms, lb.lambdas).real
    span_dim = int(np.linalg.matrix_rank(coeff, tol=1e-10))

    def weight(gens):
        proj = -np.einsum("cab,mba->cm", comms, gens).real
        return float(np.linalg.norm(proj) ** 2)

    total = float(np.linalg.norm(coeff) ** 2)
    return {
        "span_dim": span_dim,
        "total_weight": total,
        "weight_k_twisted": weight(lb.k_generators),
        "weight_torus": weight(lb.k_prime_generators),
        "weight_abelian_planes": weight(np.concatenate(
            [lb.a_generators, lb.a_prime_generators])),
        "weight_local": weight(lb.local_generators),
    }


def convention_report(seed=0) -> dict:
    """Audit of the basis-normalization pin against the composite constraints.

    Builds a random elementary kernel (the sum rule must give 1 under the
    pin) and a random composite kernel, then prints the measured block
    norms alongside every candidate target triple and the authoritative
    matrix-level residuals.  Discrepancies between conventions are part of
    the report by construction.
    """
    from .composite import make_composite_kernel, verify_composite_master
    from .kernel import kernel_from_spectrum, solve_kernel_spectrum
    from .linalg import BipartiteDims, haar_unitary

    spec = solve_kernel_spectrum(4, "random", seed=seed)
    elem = kernel_from_spectrum(spec, haar_unitary(4, seed))
    s_value = elementary_constraint_value(
        fano_decompose(elem.mat, coeff=KERNEL_COEFF, basis_norm="HS2"))

    dims = BipartiteDims(2, 2)
    comp = make_composite_kernel(dims, seed)
    block_report = twoqubit_constraint_values(comp.mat)
    matrix_report = verify_composite_master(comp.mat, dims)
    return {
        "pinned_convention": "HS2",
        "elementary_sum_rule": s_value,
        "elementary_sum_rule_target": 1.0,
        "composite_blocks": block_report.as_dict(),
        "composite_matrix_report": matrix_report.as_dict(),
    }
