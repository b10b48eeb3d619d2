"""Gaussian mollification of grids and profiles via circular FFT convolution.

Gaussian convention (used everywhere in this package): the unit-scale kernel
is ``gamma_n(x) = (2 pi)^(-n/2) exp(-|x|^2 / 2)`` and its scaled version is
``gamma_{n,eps}(x) = eps^(-n) gamma_n(x / eps)``.  Discrete kernels are
renormalized to unit discrete mass (sum times cell volume equals one), which
makes mass conservation of the convolution exact by construction.

Supports are kept a ``length / 8`` margin away from the boundary, so the
circular wraparound of the FFT convolution is bounded by the Gaussian tail
``exp(-(L / 8 eps)^2 / 2)`` and is negligible for every admissible ``eps``.
"""

from __future__ import annotations

import numpy as np

from .grids import BinaryGrid, GridSpec, Profile1D, ScalarField


class UnderResolvedError(ValueError):
    """Mollification width below the resolvable floor of the lattice."""

    def __init__(self, epsilon: float, step: float):
        self.epsilon = epsilon
        self.min_epsilon = 2.0 * step
        super().__init__(
            f"epsilon={epsilon:.6g} under-resolves the lattice (step {step:.6g}); "
            f"minimum admissible epsilon is 2h = {self.min_epsilon:.6g}"
        )


def _check_resolved(epsilon: float, step: float) -> None:
    if not (epsilon > 0):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if epsilon < 2.0 * step - 1e-12 * step:
        raise UnderResolvedError(epsilon, step)


def _periodic_offsets(m: int, step: float) -> np.ndarray:
    """Signed distances to lattice point 0 on a periodic lattice of m cells."""
    k = np.arange(m)
    k = np.where(k <= m // 2, k, k - m)
    return k * step


def gaussian_kernel_1d(m: int, step: float, epsilon: float) -> np.ndarray:
    """Periodic 1D Gaussian kernel in wraparound order, unit discrete mass."""
    _check_resolved(epsilon, step)
    t = _periodic_offsets(m, step)
    k = np.exp(-0.5 * (t / epsilon) ** 2)  # prefactor drops in the renormalization
    k /= k.sum() * step
    return k


def gaussian_kernel_2d(spec: GridSpec, epsilon: float) -> np.ndarray:
    """Periodic 2D Gaussian kernel in wraparound order, unit discrete mass."""
    _check_resolved(epsilon, spec.h)
    t = _periodic_offsets(spec.n, spec.h)
    r2 = t[:, None] ** 2 + t[None, :] ** 2
    k = np.exp(-0.5 * r2 / epsilon ** 2)
    k /= k.sum() * spec.h ** 2
    return k


def gaussian_kernel(dimension: int, epsilon: float, lattice) -> np.ndarray:
    """Kernel sampler dispatching on dimension (1: (m, step) or Profile1D; 2: GridSpec)."""
    if dimension == 2:
        return gaussian_kernel_2d(lattice, epsilon)
    if dimension == 1:
        if isinstance(lattice, Profile1D):
            return gaussian_kernel_1d(lattice.m, lattice.dt, epsilon)
        m, step = lattice
        return gaussian_kernel_1d(int(m), float(step), epsilon)
    raise ValueError(f"dimension must be 1 or 2, got {dimension}")


def mollify2d(source: BinaryGrid | ScalarField, epsilon: float) -> ScalarField:
    """Circular FFT convolution with the 2D Gaussian kernel at width epsilon."""
    if isinstance(source, BinaryGrid):
        spec, values = source.spec, source.cells.astype(np.float64)
    else:
        spec, values = source.spec, source.values
    kernel = gaussian_kernel_2d(spec, epsilon)
    out = np.fft.irfft2(np.fft.rfft2(values) * np.fft.rfft2(kernel), s=values.shape)
    out *= spec.h ** 2  # discrete convolution times cell volume = continuum convolution
    return ScalarField(spec, out, provenance=f"mollified(eps={epsilon:.6g})")


def mollify1d(profile: Profile1D, epsilon: float) -> Profile1D:
    """Circular FFT convolution with the 1D Gaussian kernel at width epsilon."""
    kernel = gaussian_kernel_1d(profile.m, profile.dt, epsilon)
    out = np.fft.irfft(np.fft.rfft(profile.values) * np.fft.rfft(kernel), n=profile.m)
    out *= profile.dt
    return Profile1D(profile.dt, profile.t0, out)


def epsilon_schedule(spec: GridSpec, eps0: float | None = None, ratio: float = 0.5,
                     stop_cells: float = 2.0, count: int | None = None) -> list[float]:
    """Geometric mollification schedule eps_k = eps0 * ratio^k.

    Defaults start at L / 32 and halve while eps stays at or above
    ``stop_cells * h`` (never below the 2h admissibility floor).
    """
    if eps0 is None:
        eps0 = spec.length / 32.0
    if not (0 < ratio < 1):
        raise ValueError(f"schedule ratio must lie in (0, 1), got {ratio}")
    floor = max(float(stop_cells), 2.0) * spec.h
    out: list[float] = []
    eps = float(eps0)
    while eps >= floor * (1.0 - 1e-9):
        out.append(eps)
        if count is not None and len(out) >= count:
            break
        eps *= ratio
    if count is not None and len(out) < count:
        raise ValueError(
            f"schedule from eps0={eps0:.6g} reaches the floor {floor:.6g} after "
            f"{len(out)} steps; cannot supply count={count}"
        )
    if not out:
        raise ValueError(f"eps0={eps0:.6g} is already below the floor {floor:.6g}")
    return out
