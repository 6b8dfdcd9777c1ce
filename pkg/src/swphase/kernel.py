"""Stratonovich-Weyl kernels for elementary N-level systems.

A kernel is a Hermitian matrix satisfying the master equations
tr(Delta) = 1 and tr(Delta^2) = N.  The admissible spectra form a sphere of
radius sqrt(N - 1/N) around (1/N, ..., 1/N) inside the trace-1 hyperplane;
kernels are the unitary orbit of a spectrum.  Wigner values are the pairing
W = tr(rho Delta).

The phase-space measure is normalized so that the total volume of the
unitary orbit is N; with that choice the orbit average of the kernel is the
identity operator and state reconstruction holds exactly (verified both in
closed form via the Haar second moment and by Monte Carlo).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DensityMatrix,
    as_complex_matrix,
    hermiticity_defect,
    _haar_from_rng,
)

__all__ = [
    "KernelSpectrum",
    "SWKernel",
    "MasterReport",
    "hyperplane_frame",
    "solve_kernel_spectrum",
    "kernel_from_spectrum",
    "wigner_value",
    "haar_second_moment_coefficients",
    "reconstruct_exact",
    "reconstruct_mc",
    "phase_space_norm_mc",
    "verify_master",
    "covariance_check",
]

# Purity-type quantities pass through an eigensolver once; algebraic
# identities keep the tighter default.
PURITY_TOL = 1e-10


def hyperplane_frame(n: int) -> np.ndarray:
    """Fixed orthonormal basis (rows) of the sum-zero hyperplane in R^n.

    Row k is (1, ..., 1, -k, 0, ..., 0) / sqrt(k (k+1)) with k leading ones.
    """
    f = np.zeros((n - 1, n))
    for k in range(1, n):
        f[k - 1, :k] = 1.0
        f[k - 1, k] = -float(k)
        f[k - 1] /= np.sqrt(k * (k + 1.0))
    return f


@dataclass(frozen=True)
class KernelSpectrum:
    """Ordered (descending) eigenvalues of an SW kernel.

    Invariants: sum(pi) = 1 and sum(pi^2) = N, both within 1e-12.
    """

    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        object.__setattr__(self, "pi", pi)
        if pi.ndim != 1 or pi.size < 2:
            raise ValueError("spectrum must be a vector of length >= 2")
        if np.any(np.diff(pi) > 0):
            raise ValueError("spectrum must be sorted descending")
        n = pi.size
        if abs(pi.sum() - 1.0) > DEFAULT_TOL:
            raise ValueError(f"sum {pi.sum()} != 1")
        if abs((pi**2).sum() - n) > DEFAULT_TOL:
            raise ValueError(f"sum of squares {(pi ** 2).sum()} != {n}")

    @property
    def n(self) -> int:
        return self.pi.size

    def traceless_part(self) -> np.ndarray:
        """pi - 1/N; Euclidean norm sqrt(N - 1/N)."""
        return self.pi - 1.0 / self.n

    def unit_direction(self) -> np.ndarray:
        """Unit-normalized traceless part (the direction on the moduli sphere)."""
        t = self.traceless_part()
        return t / np.linalg.norm(t)


def solve_kernel_spectrum(n: int, selector: str = "canonical", *, seed=None,
                          vector=None) -> KernelSpectrum:
    """Solve sum(pi) = 1, sum(pi^2) = n for an ordered spectrum.

    Parameters
    ----------
    n : int
        System dimension, >= 2.
    selector : {"canonical", "random", "from_unit_vector"}
        canonical: traceless part along the first hyperplane-frame axis
        (1, -1, 0, ...) / sqrt(2).  random: uniform on the spectrum sphere,
        driven by ``seed``.  from_unit_vector: map a unit (n-1)-vector
        through the fixed frame.
    seed : rng seed, for selector="random".
    vector : array_like, for selector="from_unit_vector".

    Returns
    -------
    KernelSpectrum
        Sorted descending (the moduli representative).
    """
    if n < 2:
        raise ValueError("kernel spectra need n >= 2")
    radius = np.sqrt(n - 1.0 / n)
    if selector == "canonical":
        v = np.zeros(n - 1)
        v[0] = 1.0
    elif selector == "random":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n - 1)
        while np.linalg.norm(v) < 1e-12:
            v = rng.standard_normal(n - 1)
        v /= np.linalg.norm(v)
    elif selector == "from_unit_vector":
        v = np.asarray(vector, dtype=float)
        if v.shape != (n - 1,):
            raise ValueError(f"vector must have shape ({n - 1},)")
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("vector must have unit norm")
    else:
        raise ValueError(f"unknown selector {selector!r}")
    pi = 1.0 / n + radius * (v @ hyperplane_frame(n))
    return KernelSpectrum(np.sort(pi)[::-1])


@dataclass(frozen=True)
class SWKernel:
    """A Stratonovich-Weyl kernel: Hermitian with tr = 1 and tr^2 = N."""

    mat: np.ndarray
    n: int

    def __post_init__(self):
        m = as_complex_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        if m.shape[0] != self.n:
            raise ValueError(f"matrix is {m.shape[0]}x{m.shape[0]}, n = {self.n}")
        defect = hermiticity_defect(m)
        if defect > DEFAULT_TOL:
            raise ValueError(f"kernel not Hermitian: defect {defect:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > DEFAULT_TOL:
            raise ValueError(f"kernel trace {tr} != 1")
        purity = np.trace(m @ m).real
        if abs(purity - self.n) > PURITY_TOL:
            raise ValueError(f"kernel purity {purity} != {self.n}")

    @property
    def spectrum(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.mat))[::-1]


def kernel_from_spectrum(spec: KernelSpectrum, u) -> SWKernel:
    """Conjugate diag(pi) by a unitary: the orbit point u diag(pi) u^dagger."""
    um = as_complex_matrix(u)
    n = spec.n
    if um.shape[0] != n:
        raise ValueError(f"unitary is {um.shape[0]}x{um.shape[0]}, spectrum has n = {n}")
    if np.linalg.norm(um @ um.conj().T - np.eye(n)) > DEFAULT_TOL:
        raise ValueError("u is not unitary")
    mat = (um * spec.pi) @ um.conj().T
    mat = (mat + mat.conj().T) / 2.0
    return SWKernel(mat, n)


def wigner_value(rho: DensityMatrix, delta: SWKernel) -> float:
    """Wigner quasiprobability value W = tr(rho Delta); real, may be negative."""
    if rho.dim != delta.n:
        raise ValueError(f"dimension mismatch: state {rho.dim}, kernel {delta.n}")
    w = np.trace(rho.mat @ delta.mat)
    if abs(w.imag) > DEFAULT_TOL:
        raise ValueError(f"pairing has imaginary part {w.imag:.3e}")
    return float(w.real)


def _spectrum_values(spec) -> np.ndarray:
    if isinstance(spec, KernelSpectrum):
        return spec.pi
    return np.asarray(spec, dtype=float)


def haar_second_moment_coefficients(n: int, tr_delta: float, tr_delta_sq: float):
    """Coefficients (alpha, beta) of the Haar-averaged pairing map.

    The average over the unitary orbit of (U D U†) tr(rho U D U†) equals
    alpha * rho + beta * tr(rho) * I with

        alpha = (n tr(D^2) - tr(D)^2) / (n (n^2 - 1))
        beta  = (n tr(D)^2 - tr(D^2)) / (n (n^2 - 1))

    With tr(D) = 1 and tr(D^2) = n this gives alpha = 1/n, beta = 0, so the
    measure-weighted integral (total measure n) reproduces rho exactly.
    """
    denom = n * (n * n - 1.0)
    alpha = (n * tr_delta_sq - tr_delta**2) / denom
    beta = (n * tr_delta**2 - tr_delta_sq) / denom
    return alpha, beta


def reconstruct_exact(rho: DensityMatrix, spec) -> np.ndarray:
    """Closed-form orbit-integral reconstruction of a state.

    Evaluates N * integral dU (U D U†) tr(rho U D U†) via the Haar second
    moment.  For a valid spectrum this returns ``rho.mat`` exactly; for
    perturbed moment values it returns the analytically predicted deviation,
    so ``spec`` may be a KernelSpectrum or a raw eigenvalue array.
    """
    pi = _spectrum_values(spec)
    n = rho.dim
    if pi.size != n:
        raise ValueError(f"dimension mismatch: state {n}, spectrum {pi.size}")
    alpha, beta = haar_second_moment_coefficients(n, pi.sum(), (pi**2).sum())
    return n * (alpha * rho.mat + beta * np.trace(rho.mat) * np.eye(n))


def reconstruct_mc(rho: DensityMatrix, spec, samples: int, seed,
                   chunk: int = 50_000) -> np.ndarray:
    """Monte-Carlo orbit-integral reconstruction.

    Returns (N / samples) * sum_k (U_k D U_k†) tr(rho U_k D U_k†) over Haar
    samples U_k.  Converges to rho at the O(1/sqrt(samples)) rate.
    Deterministic given ``seed``; chunking only bounds memory, the sample
    stream and summation order are fixed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pi = _spectrum_values(spec)
    n = rho.dim
    if pi.size != n:
        raise ValueError(f"dimension mismatch: state {n}, spectrum {pi.size}")
    rng = np.random.default_rng(seed)
    acc = np.zeros((n, n), dtype=complex)
    remaining = samples
    while remaining > 0:
        b = min(chunk, remaining)
        u = _haar_from_rng(n, rng, size=b)
        orbit = (u * pi) @ u.conj().transpose(0, 2, 1)
        w = np.einsum("kij,ji->k", orbit, rho.mat).real
        acc += np.einsum("k,kij->ij", w, orbit)
        remaining -= b
    return n * acc / samples


def phase_space_norm_mc(rho: DensityMatrix, spec, samples: int, seed,
                        chunk: int = 50_000) -> float:
    """Monte-Carlo estimate of the phase-space integral of the Wigner function.

    Estimates (N / samples) * sum_k tr(rho U_k D U_k†), which converges to
    tr(rho) = 1: the finite-norm axiom under the total-measure-N convention.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pi = _spectrum_values(spec)
    n = rho.dim
    rng = np.random.default_rng(seed)
    total = 0.0
    remaining = samples
    while remaining > 0:
        b = min(chunk, remaining)
        u = _haar_from_rng(n, rng, size=b)
        orbit = (u * pi) @ u.conj().transpose(0, 2, 1)
        total += np.einsum("kij,ji->k", orbit, rho.mat).real.sum()
        remaining -= b
    return n * total / samples


@dataclass(frozen=True)
class MasterReport:
    """Residual report for the master equations at dimension n."""

    hermitian: bool
    hermiticity_defect: float
    trace_residual: float
    purity_residual: float

    def ok(self, tol: float) -> bool:
        return (self.hermiticity_defect <= tol
                and self.trace_residual <= tol
                and self.purity_residual <= tol)

    def as_dict(self) -> dict:
        return {
            "hermitian": self.hermitian,
            "hermiticity_defect": self.hermiticity_defect,
            "trace_residual": self.trace_residual,
            "purity_residual": self.purity_residual,
        }


def verify_master(x, n: int, tol: float = PURITY_TOL) -> MasterReport:
    """Report |tr x - 1|, |tr x^2 - n| and the Hermiticity defect."""
    m = as_complex_matrix(x)
    if m.shape[0] != n:
        raise ValueError(f"matrix is {m.shape[0]}x{m.shape[0]}, n = {n}")
    defect = hermiticity_defect(m)
    trace_res = abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag)
    purity = np.trace(m @ m)
    purity_res = abs(purity.real - n) + abs(purity.imag)
    return MasterReport(
        hermitian=defect <= tol,
        hermiticity_defect=float(defect),
        trace_residual=float(trace_res),
        purity_residual=float(purity_res),
    )


def covariance_check(delta: SWKernel, rho: DensityMatrix, u) -> float:
    """Residual |tr(rho U Delta U†) - tr(U† rho U Delta)|.

    Zero up to roundoff for any unitary: an executable witness that moving
    the kernel along the orbit is the same as countermoving the state.
    """
    um = as_complex_matrix(u)
    if np.linalg.norm(um @ um.conj().T - np.eye(um.shape[0])) > DEFAULT_TOL:
        raise ValueError("u is not unitary")
    lhs = np.trace(rho.mat @ (um @ delta.mat @ um.conj().T))
    rhs = np.trace((um.conj().T @ rho.mat @ um) @ delta.mat)
    return float(abs(lhs - rhs))
