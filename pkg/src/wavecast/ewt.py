"""Spectrum-adaptive wavelet filter bank decomposing a series into additive bands."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

__all__ = [
    "EwtConfig",
    "Spectrum",
    "SpectralBoundaries",
    "EwtFilterBank",
    "EwtDecomposition",
    "TooShort",
    "NoPeaks",
    "InadmissibleGamma",
    "meyer_beta",
    "compute_spectrum",
    "detect_maxima",
    "compute_boundaries",
    "admissibility_bound",
    "filter_responses",
    "build_filter_bank",
    "decompose",
    "decompose_with_boundaries",
    "reconstruct",
]


class TooShort(ValueError):
    """The series is too short for a meaningful spectrum."""


class NoPeaks(ValueError):
    """The magnitude spectrum has no local maxima away from the zero frequency."""


class InadmissibleGamma(ValueError):
    """The transition half-width violates the tight-frame bound for these boundaries."""


@dataclass(frozen=True)
class EwtConfig:
    """Decomposition knobs: band count, transition half-width, and peak filtering.

    `num_components` and `gamma` accept the string "auto". Auto band count keeps
    spectral peaks whose prominence reaches `min_peak_prominence` times the
    largest non-DC magnitude, capped at `max_auto_components`. Auto gamma takes
    0.9 times the largest admissible value for the detected boundaries.
    """

    num_components: int | str = "auto"
    gamma: float | str = "auto"
    min_peak_prominence: float = 0.1
    max_auto_components: int = 6

    def __post_init__(self) -> None:
        if self.num_components != "auto":
            if int(self.num_components) < 1:
                raise ValueError("num_components must be at least 1")
            object.__setattr__(self, "num_components", int(self.num_components))
        if self.gamma != "auto":
            gamma = float(self.gamma)
            if not 0.0 < gamma < 1.0:
                raise ValueError("gamma must lie strictly between 0 and 1")
            object.__setattr__(self, "gamma", gamma)
        if not 0.0 <= self.min_peak_prominence <= 1.0:
            raise ValueError("min_peak_prominence must lie in [0, 1]")
        if self.max_auto_components < 1:
            raise ValueError("max_auto_components must be at least 1")


@dataclass(frozen=True)
class Spectrum:
    """One-sided discrete spectrum of a real series."""

    values: np.ndarray
    omegas: np.ndarray
    series_length: int


@dataclass(frozen=True)
class SpectralBoundaries:
    """Detected spectral maxima and the band boundaries cut between them.

    `delta` holds the midpoints between consecutive maxima plus a terminal
    boundary at pi, so a bank with H components carries H boundaries and the
    last one is always pi.
    """

    omega_maxima: tuple[float, ...]
    delta: tuple[float, ...]
    gamma_used: float

    def __post_init__(self) -> None:
        delta = tuple(float(d) for d in self.delta)
        if not delta:
            raise ValueError("at least one boundary is required")
        if any(not 0.0 < d <= np.pi for d in delta):
            raise ValueError("boundaries must lie in (0, pi]")
        if any(b <= a for a, b in zip(delta, delta[1:])):
            raise ValueError("boundaries must be strictly increasing")
        if abs(delta[-1] - np.pi) > 1e-12:
            raise ValueError("the terminal boundary must be pi")
        if not 0.0 < self.gamma_used < 1.0:
            raise ValueError("gamma_used must lie strictly between 0 and 1")
        bound = admissibility_bound(delta)
        if self.gamma_used >= bound:
            raise InadmissibleGamma(
                f"gamma {self.gamma_used} reaches the tight-frame bound {bound}"
            )
        object.__setattr__(self, "omega_maxima", tuple(float(m) for m in self.omega_maxima))
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "gamma_used", float(self.gamma_used))

    @property
    def num_components(self) -> int:
        return len(self.delta)


@dataclass(frozen=True)
class EwtFilterBank:
    """Filter magnitude responses sampled on a DFT grid of `grid_size` bins."""

    phi1: np.ndarray
    psis: tuple[np.ndarray, ...]
    grid_size: int


@dataclass(frozen=True)
class EwtDecomposition:
    """Additive components of a series plus the boundaries that produced them."""

    components: tuple[np.ndarray, ...]
    boundaries: SpectralBoundaries
    original_length: int

    @property
    def num_components(self) -> int:
        return len(self.components)

    def as_matrix(self) -> np.ndarray:
        """Components stacked as rows, shape (num_components, original_length)."""
        return np.vstack(self.components)


def meyer_beta(theta: np.ndarray | float) -> np.ndarray:
    """Degree-7 transition polynomial, clamped to [0, 1] outside the unit interval."""
    t = np.clip(np.asarray(theta, dtype=np.float64), 0.0, 1.0)
    return (t**4) * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


def admissibility_bound(delta: Sequence[float]) -> float:
    """Largest gamma that keeps adjacent transition bands disjoint (1 if unconstrained)."""
    pairs = list(zip(delta, list(delta)[1:]))
    if not pairs:
        return 1.0
    return min((b - a) / (b + a) for a, b in pairs)


def compute_spectrum(series: Sequence[float]) -> Spectrum:
    """One-sided discrete Fourier spectrum of a real series on [0, pi]."""
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < 4:
        raise TooShort(f"need at least 4 samples, got {x.size}")
    values = np.fft.rfft(x)
    omegas = 2.0 * np.pi * np.arange(values.size) / x.size
    return Spectrum(values=values, omegas=omegas, series_length=int(x.size))


def detect_maxima(spectrum: Spectrum, config: EwtConfig) -> np.ndarray:
    """Frequencies of retained magnitude-spectrum maxima, ascending.

    The zero-frequency bin never counts as a maximum: it belongs to the
    low-pass band by construction, and a trend-dominated spectrum would
    otherwise mask every genuine peak, so prominence is referenced to the
    largest non-DC magnitude.
    """
    magnitude = np.abs(spectrum.values)
    if magnitude.size < 3 or float(magnitude[1:].max(initial=0.0)) <= 0.0:
        raise NoPeaks("magnitude spectrum is flat away from the zero frequency")
    reference = float(magnitude[1:].max())
    if config.num_components == "auto":
        peaks, _ = find_peaks(magnitude, prominence=config.min_peak_prominence * reference)
        if peaks.size == 0:
            raise NoPeaks("no spectral peak clears the prominence threshold")
        keep = config.max_auto_components
    else:
        peaks, _ = find_peaks(magnitude)
        if peaks.size == 0:
            raise NoPeaks("the magnitude spectrum has no local maxima")
        keep = int(config.num_components)
    # rank by magnitude (ties broken by lower frequency), then re-sort ascending
    order = sorted(range(peaks.size), key=lambda k: (-magnitude[peaks[k]], peaks[k]))
    chosen = sorted(peaks[k] for k in order[:keep])
    return spectrum.omegas[np.asarray(chosen, dtype=int)]


def compute_boundaries(maxima: Sequence[float], config: EwtConfig) -> SpectralBoundaries:
    """Midpoint boundaries between consecutive maxima, with a terminal boundary at pi."""
    omega = [float(m) for m in maxima]
    if not omega:
        raise ValueError("at least one maximum is required")
    if any(not 0.0 < m < np.pi for m in omega):
        raise ValueError("maxima must lie strictly inside (0, pi)")
    if any(b <= a for a, b in zip(omega, omega[1:])):
        raise ValueError("maxima must be strictly increasing")
    delta = [(a + b) / 2.0 for a, b in zip(omega, omega[1:])]
    delta.append(float(np.pi))
    bound = admissibility_bound(delta)
    if config.gamma == "auto":
        gamma = 0.9 * min(bound, 1.0)
    else:
        gamma = float(config.gamma)
        if gamma >= bound:
            binding = min(zip(delta, delta[1:]), key=lambda p: (p[1] - p[0]) / (p[1] + p[0]), default=None)
            raise InadmissibleGamma(
                f"gamma {gamma} reaches the tight-frame bound {bound:.6f}"
                + (f" set by the boundary pair {binding}" if binding else "")
            )
    return SpectralBoundaries(omega_maxima=tuple(omega), delta=tuple(delta), gamma_used=gamma)


def _falling_edge(omega: np.ndarray, boundary: float, gamma: float) -> np.ndarray:
    """Unit response below the transition band around `boundary`, zero above."""
    lo = (1.0 - gamma) * boundary
    hi = (1.0 + gamma) * boundary
    theta = (omega - lo) / (2.0 * gamma * boundary)
    inside = np.cos(np.pi / 2.0 * meyer_beta(theta))
    return np.where(omega <= lo, 1.0, np.where(omega >= hi, 0.0, inside))


def _rising_edge(omega: np.ndarray, boundary: float, gamma: float) -> np.ndarray:
    """Zero response below the transition band around `boundary`, unit above."""
    lo = (1.0 - gamma) * boundary
    hi = (1.0 + gamma) * boundary
    theta = (omega - lo) / (2.0 * gamma * boundary)
    inside = np.sin(np.pi / 2.0 * meyer_beta(theta))
    return np.where(omega <= lo, 0.0, np.where(omega >= hi, 1.0, inside))


def filter_responses(
    boundaries: SpectralBoundaries, omegas: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Sample the scaling and wavelet filter magnitude responses at `omegas`.

    The terminal boundary at pi carries no transition: the top filter stays at
    unit response through pi, which is what closes the partition of unity over
    the whole interval. With a single band the scaling filter is all-pass.
    """
    omega = np.abs(np.asarray(omegas, dtype=np.float64))
    delta = boundaries.delta
    gamma = boundaries.gamma_used
    if len(delta) == 1:
        return np.ones_like(omega), []
    phi1 = _falling_edge(omega, delta[0], gamma)
    psis = []
    for h in range(len(delta) - 1):
        rise = _rising_edge(omega, delta[h], gamma)
        if h + 1 == len(delta) - 1:
            psis.append(rise)
        else:
            psis.append(rise * _falling_edge(omega, delta[h + 1], gamma))
    return phi1, psis


def build_filter_bank(boundaries: SpectralBoundaries, grid_size: int) -> EwtFilterBank:
    """Sample the filter bank on the full DFT grid of a length-`grid_size` signal."""
    if grid_size < 1:
        raise ValueError("grid_size must be positive")
    k = np.arange(grid_size)
    omega = 2.0 * np.pi * np.minimum(k, grid_size - k) / grid_size
    phi1, psis = filter_responses(boundaries, omega)
    return EwtFilterBank(phi1=phi1, psis=tuple(psis), grid_size=int(grid_size))


def decompose_with_boundaries(
    series: Sequence[float], boundaries: SpectralBoundaries
) -> EwtDecomposition:
    """Filter a series through an existing boundary set (frozen filter bank)."""
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < 4:
        raise TooShort(f"need at least 4 samples, got {x.size}")
    bank = build_filter_bank(boundaries, x.size)
    transform = np.fft.fft(x)
    components = []
    for response in (bank.phi1, *bank.psis):
        # analysis and synthesis of the tight frame collapse into one pass:
        # squared responses keep the plain component sum equal to the input
        component = np.fft.ifft(transform * response**2)
        residue = float(np.abs(component.imag).max(initial=0.0))
        if residue >= 1e-9:
            raise RuntimeError(f"imaginary residue {residue} exceeds tolerance")
        components.append(component.real)
    return EwtDecomposition(
        components=tuple(components), boundaries=boundaries, original_length=int(x.size)
    )


def decompose(series: Sequence[float], config: EwtConfig | None = None) -> EwtDecomposition:
    """Detect boundaries from the series spectrum and split it into components."""
    config = config or EwtConfig()
    x = np.asarray(series, dtype=np.float64)
    spectrum = compute_spectrum(x)
    maxima = detect_maxima(spectrum, config)
    boundaries = compute_boundaries(maxima, config)
    return decompose_with_boundaries(x, boundaries)


def reconstruct(decomposition: EwtDecomposition) -> np.ndarray:
    """Elementwise sum of the components."""
    total = np.zeros(decomposition.original_length, dtype=np.float64)
    for component in decomposition.components:
        total = total + component
    return total
