"""Diversity spectra, diversity measures, and an independent cross-check.

The eigenvalues of the product of the Gram and coefficient correlation
matrices approximate the spectrum of the spatial autocorrelation operator.
The product of two Hermitian matrices is not Hermitian itself, so the
solve goes through the spectral square root:

    eig(R^(1/2) G R^(1/2)) = eig(G R),

which is manifestly real and non-negative and keeps the sort stable.

Each solve carries two certified error bounds, both proportional to
``rho_max * exp(N_D - N)``: one for individual eigenvalues (factor 0.2)
and one for the squared Hilbert-Schmidt norm (factor ``0.4 * rho_max``),
the latter of which controls the error of the diversity measure.

:func:`nystrom_oracle` solves the same eigenvalue problem by direct
kernel discretisation.  That route converges more slowly and is kept only
as an independent verification of the matrix route.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .aperture import (
    Circle,
    DiscreteArray,
    Disk,
    ParallelLines,
    PiecewiseCurve,
    Rectangle,
    Segment,
    centering_transform,
    enclosing_radius,
)
from .operators import TruncatedOperator, rho_n_kernel
from .pas import PasModel

__all__ = [
    "DiversitySpectrum",
    "DiscreteDiversityReport",
    "ExcessiveClampError",
    "BoundTooLooseError",
    "OracleConvergenceError",
    "solve_spectrum",
    "diversity_measure",
    "omega_corrected",
    "discrete_correlation",
    "discrete_diversity",
    "discrete_report",
    "mimo_slope",
    "nystrom_oracle",
]

logger = logging.getLogger(__name__)

#: Eigenvalues in (-1e-8, 0) are rounding noise and are clamped to zero;
#: anything below signals a broken matrix pair and raises.
_CLAMP_FLOOR = 1e-8


class ExcessiveClampError(ArithmeticError):
    """A computed eigenvalue was negative beyond rounding tolerance."""


class BoundTooLooseError(ValueError):
    """The certified error is too large for a meaningful correction."""


class OracleConvergenceError(RuntimeError):
    """Kernel discretisation did not converge within the node budget."""


@dataclass(frozen=True)
class DiversitySpectrum:
    """Descending eigenvalues of a solved aperture/PAS pair with bounds.

    ``eigenvalues`` sum to ``trace`` (equal to one up to the certified
    truncation residual), ``omega`` is the effective number of equal-power
    uncorrelated branches, and ``inv_omega`` its reciprocal computed from
    the same truncated sums.  ``eig_error_bound`` certifies each
    eigenvalue, ``hs_error_bound`` the squared Hilbert-Schmidt norm
    ``hs_norm_sq``.
    """

    eigenvalues: np.ndarray
    trace: float
    omega: float
    inv_omega: float
    hs_norm_sq: float
    eig_error_bound: float
    hs_error_bound: float
    N: int
    N_D: int
    r1: float
    rho_max: float


def _hermitian_sqrt(mat: np.ndarray, label: str) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    if vals[0] < 0.0:
        if vals[0] < -_CLAMP_FLOOR:
            logger.warning(
                "%s has negative eigenvalue %.3e; clamping to zero", label, vals[0]
            )
        vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def solve_spectrum(op: TruncatedOperator) -> DiversitySpectrum:
    """Solve the truncated eigenvalue problem and attach certified bounds."""
    root = _hermitian_sqrt(op.rtilde, "coefficient correlation matrix")
    sym = root @ op.gram @ root
    sym = 0.5 * (sym + sym.conj().T)
    lam = np.linalg.eigvalsh(sym)[::-1].copy()
    if lam[-1] < -_CLAMP_FLOOR:
        raise ExcessiveClampError(
            f"eigenvalue {lam[-1]:.3e} below the clamping floor; "
            "the Gram or correlation matrix is broken"
        )
    np.clip(lam, 0.0, None, out=lam)
    decay = math.exp(op.N_D - op.N)
    trace = float(lam.sum())
    hs_norm_sq = float(np.sum(lam * lam))
    # norm hierarchy: operator norm <= Hilbert-Schmidt norm <= trace norm
    hs_norm = math.sqrt(hs_norm_sq)
    if lam[0] > hs_norm + 1e-12 or hs_norm > trace + 1e-12:
        raise ArithmeticError("computed spectrum violates the norm hierarchy")
    omega = trace * trace / hs_norm_sq
    return DiversitySpectrum(
        eigenvalues=lam,
        trace=trace,
        omega=omega,
        inv_omega=hs_norm_sq / (trace * trace),
        hs_norm_sq=hs_norm_sq,
        eig_error_bound=0.2 * op.rho_max * decay,
        hs_error_bound=0.4 * op.rho_max * op.rho_max * decay,
        N=op.N,
        N_D=op.N_D,
        r1=op.r1,
        rho_max=op.rho_max,
    )


def diversity_measure(spectrum) -> float:
    """Effective number of equal-power uncorrelated branches.

    Accepts a :class:`DiversitySpectrum` or a bare eigenvalue array and
    evaluates ``(sum lam)**2 / sum lam**2`` from the truncated values,
    without assuming the trace equals one (the truncation bias then
    cancels to first order).  Always at least 1.
    """
    lam = np.asarray(
        spectrum.eigenvalues if isinstance(spectrum, DiversitySpectrum) else spectrum,
        dtype=float,
    )
    s2 = float(np.sum(lam * lam))
    if s2 == 0.0:
        raise ValueError("diversity measure of an all-zero spectrum is undefined")
    s1 = float(np.sum(lam))
    return s1 * s1 / s2


def omega_corrected(spectrum: DiversitySpectrum) -> tuple[float, float]:
    """Diversity measure with the truncation bias compensated.

    The truncated measure underestimates or overestimates the true one by
    a relative amount ``eps = omega * hs_error_bound`` at most; summing the
    geometric series gives the centre ``omega / (1 - eps)`` with the
    second-order remainder ``omega * eps**2 / (1 - eps)`` as half-width.
    Requires ``eps < 1/2``.
    """
    eps = spectrum.omega * spectrum.hs_error_bound
    if eps >= 0.5:
        raise BoundTooLooseError(
            f"certified relative error {eps:.3f} >= 0.5; raise the truncation order"
        )
    center = spectrum.omega / (1.0 - eps)
    half_width = spectrum.omega * eps * eps / (1.0 - eps)
    return center, half_width


def discrete_correlation(positions, model: PasModel, N: int | None = None) -> np.ndarray:
    """Correlation matrix of a finite antenna array.

    Entry ``(i, k)`` is the truncated correlation kernel at the antenna
    displacement ``x_i - x_k``; the truncation order must cover the
    largest pairwise distance.  The result is Hermitian with unit
    diagonal by construction.
    """
    pts = np.asarray(positions, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("positions must be a non-empty (L, 2) array")
    L = pts.shape[0]
    diffs = pts[:, None, :] - pts[None, :, :]
    max_dist = float(np.max(np.hypot(diffs[..., 0], diffs[..., 1])))
    n_critical = specfun.truncation_order(max_dist)
    if N is None:
        N = n_critical + 10
    if N < n_critical:
        raise ValueError(
            f"discrete_correlation requires N >= {n_critical} for this array"
        )
    iu, ku = np.triu_indices(L, k=1)
    R = np.eye(L, dtype=complex)
    if iu.size:
        vals = rho_n_kernel(model, diffs[iu, ku], N)
        R[iu, ku] = vals
        R[ku, iu] = np.conj(vals)
    return R


def discrete_diversity(R: np.ndarray) -> float:
    """Diversity measure of an antenna correlation matrix.

    Needs only the traces of ``R`` and ``R^H R``, no eigendecomposition:
    with unit diagonal this is ``L**2 / sum |R_ik|**2``, between 1 (fully
    correlated) and ``L`` (uncorrelated).
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError("discrete_diversity requires a square matrix")
    if float(np.max(np.abs(R - R.conj().T))) > 1e-10:
        raise ValueError("discrete_diversity requires a Hermitian matrix")
    if float(np.max(np.abs(np.diag(R) - 1.0))) > 1e-10:
        raise ValueError("discrete_diversity requires a unit diagonal")
    trace = float(np.trace(R).real)
    return trace * trace / float(np.sum(np.abs(R) ** 2))


@dataclass(frozen=True)
class DiscreteDiversityReport:
    """Antenna count, correlation matrix, and the resulting measure."""

    L: int
    correlation: np.ndarray
    omega: float


def discrete_report(positions, model: PasModel, N: int | None = None) -> DiscreteDiversityReport:
    """Convenience wrapper bundling :func:`discrete_correlation` and the measure."""
    R = discrete_correlation(positions, model, N)
    return DiscreteDiversityReport(L=R.shape[0], correlation=R, omega=discrete_diversity(R))


def mimo_slope(omega_tx: float, omega_rx: float) -> float:
    """Low-power spectral-efficiency slope of a two-sided antenna system.

    The harmonic mean of the transmit and receive diversity measures,
    assuming the two sides are uncorrelated.
    """
    omega_tx = float(omega_tx)
    omega_rx = float(omega_rx)
    if omega_tx < 1.0 - 1e-12 or omega_rx < 1.0 - 1e-12:
        raise ValueError("diversity measures must be >= 1")
    return 2.0 / (1.0 / omega_tx + 1.0 / omega_rx)


# ---------------------------------------------------------------------------
# Independent verification route: direct kernel discretisation
# ---------------------------------------------------------------------------
#
# The oracle builds its own nodes (Gauss along lines and radii, equispaced
# in angle) instead of reusing build_quadrature, so that the two eigenvalue
# routes share nothing beyond the Bessel kernel itself.

_ORACLE_CAP_1D = 4096
_ORACLE_CAP_RADIAL = 64


def _gauss_line(p0: np.ndarray, p1: np.ndarray, m: int):
    xi, w = np.polynomial.legendre.leggauss(int(m))
    t = (xi + 1.0) / 2.0
    nodes = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    return nodes, w / 2.0


def _oracle_nodes(aperture, m: int):
    """Kernel-discretisation nodes/weights at resolution ``m``."""
    if isinstance(aperture, Segment):
        if aperture.length == 0.0:
            return np.asarray([aperture.center]), np.array([1.0])
        d = np.array([math.cos(aperture.angle), math.sin(aperture.angle)])
        c = np.asarray(aperture.center)
        return _gauss_line(c - 0.5 * aperture.length * d, c + 0.5 * aperture.length * d, m)
    if isinstance(aperture, Circle):
        beta = 2.0 * math.pi * np.arange(m) / m
        nodes = np.asarray(aperture.center)[None, :] + aperture.radius * np.stack(
            [np.cos(beta), np.sin(beta)], axis=1
        )
        return nodes, np.full(m, 1.0 / m)
    if isinstance(aperture, ParallelLines):
        d = np.array([math.cos(aperture.angle), math.sin(aperture.angle)])
        parts = [
            _gauss_line(c - 0.5 * aperture.length * d, c + 0.5 * aperture.length * d, m)
            for c in aperture.line_centers()
        ]
        nodes = np.concatenate([p[0] for p in parts])
        weights = np.concatenate([p[1] for p in parts]) / aperture.count
        return nodes, weights
    if isinstance(aperture, PiecewiseCurve):
        total = aperture.length
        xi, w = np.polynomial.legendre.leggauss(int(m))
        t = (xi + 1.0) / 2.0
        nodes = np.concatenate([p.point(t) for p in aperture.pieces])
        weights = np.concatenate(
            [(w / 2.0) * (p.length / total) for p in aperture.pieces]
        )
        return nodes, weights
    if isinstance(aperture, Disk):
        if aperture.radius == 0.0:
            return np.asarray([aperture.center]), np.array([1.0])
        xi, wr = np.polynomial.legendre.leggauss(int(m))
        t = (xi + 1.0) / 2.0
        radii = aperture.radius * t
        w_radial = t * wr  # density 2r/r1^2 against the [0, r1] Gauss rule
        q_beta = 2 * int(m) + 1
        beta = 2.0 * math.pi * np.arange(q_beta) / q_beta
        ring = np.stack([np.cos(beta), np.sin(beta)], axis=1)
        nodes = (radii[:, None, None] * ring[None, :, :]).reshape(-1, 2)
        nodes += np.asarray(aperture.center)[None, :]
        weights = np.repeat(w_radial / q_beta, q_beta)
        return nodes, weights
    if isinstance(aperture, Rectangle):
        xi, w = np.polynomial.legendre.leggauss(int(m))
        u = (xi / 2.0) * aperture.width
        v = (xi / 2.0) * aperture.height
        U, V = np.meshgrid(u, v, indexing="ij")
        c, s = math.cos(aperture.angle), math.sin(aperture.angle)
        X = c * U - s * V + aperture.center[0]
        Y = s * U + c * V + aperture.center[1]
        nodes = np.stack([X.ravel(), Y.ravel()], axis=1)
        return nodes, np.outer(w / 2.0, w / 2.0).ravel()
    if isinstance(aperture, DiscreteArray):
        pts = aperture.as_array()
        return pts, np.full(len(pts), 1.0 / len(pts))
    raise ValueError(f"oracle does not support {type(aperture).__name__}")


def _oracle_eigs(aperture, model, m, n_kernel):
    nodes, weights = _oracle_nodes(aperture, m)
    n = len(nodes)
    K = np.empty((n, n), dtype=complex)
    # row blocks keep the intermediate basis evaluations small
    block = max(1, 500_000 // max(n, 1))
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        diffs = nodes[lo:hi, None, :] - nodes[None, :, :]
        K[lo:hi] = rho_n_kernel(model, diffs.reshape(-1, 2), n_kernel).reshape(hi - lo, n)
    sw = np.sqrt(weights)
    A = sw[:, None] * K * sw[None, :]
    A = 0.5 * (A + A.conj().T)
    return np.linalg.eigvalsh(A)[::-1]


def _top_diff(a: np.ndarray, b: np.ndarray, k: int = 10) -> float:
    k = min(k, len(a), len(b))
    return float(np.max(np.abs(a[:k] - b[:k])))


def nystrom_oracle(
    aperture,
    model: PasModel,
    points: int | None = None,
    n_kernel: int | None = None,
    tol: float = 1e-7,
) -> np.ndarray:
    """Eigenvalues by direct quadrature discretisation of the kernel.

    The kernel is sampled on an ``M``-point grid, scaled symmetrically by
    the square roots of the weights, and diagonalised; the grid is refined
    by doubling until the ten largest eigenvalues move by less than
    ``tol``.  ``points`` seeds the resolution, ``n_kernel`` defaults to a
    comfortably converged kernel truncation for the aperture diameter.

    This is the slow, assumption-free route; use it to validate
    :func:`solve_spectrum`, not to replace it.
    """
    centered, _ = centering_transform(aperture)
    r1 = enclosing_radius(centered)
    if n_kernel is None:
        n_kernel = specfun.truncation_order(2.0 * r1) + 15
    degenerate = (
        isinstance(centered, DiscreteArray)
        or (isinstance(centered, Segment) and centered.length == 0.0)
        or (isinstance(centered, Disk) and centered.radius == 0.0)
    )
    if degenerate:
        # exact point evaluation; nothing to refine
        return _oracle_eigs(centered, model, 1, n_kernel)

    two_dim = isinstance(centered, (Disk, Rectangle))
    pieces = 1
    if isinstance(centered, ParallelLines):
        pieces = centered.count
    elif isinstance(centered, PiecewiseCurve):
        pieces = len(centered.pieces)
    if points is None:
        m = 8 if two_dim else max(32, 128 // pieces)
    else:
        m = max(4, int(round(math.sqrt(points / 2.0))) if two_dim else int(points) // pieces)
    cap = _ORACLE_CAP_RADIAL if two_dim else max(m, _ORACLE_CAP_1D // pieces)
    prev = _oracle_eigs(centered, model, m, n_kernel)
    while 2 * m <= cap:
        m *= 2
        cur = _oracle_eigs(centered, model, m, n_kernel)
        if _top_diff(prev, cur) < tol:
            return cur
        prev = cur
    raise OracleConvergenceError(
        f"top eigenvalues still moving at the node cap (resolution {m})"
    )
