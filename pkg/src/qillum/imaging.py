"""Point-by-point imaging: one fixed-budget detection per pixel.

Background light from other object points is folded into the per-mode noise
weight ``b``; each pixel is an independent photon-counting test with its own
random stream.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .discrimination import TrialOutcomeModel, conditional_probs
from .errors import DomainError
from .montecarlo import replica_rng
from .scenarios import Kind, ScenarioParams


class ImagingConfigWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class ReflectivityMap:
    eta_at: np.ndarray

    def __post_init__(self):
        grid = np.array(self.eta_at, dtype=float)
        if grid.ndim != 2 or grid.size == 0:
            raise DomainError(f"reflectivity map must be a non-empty 2-D grid, got {grid.shape}")
        if np.any(grid < 0) or np.any(grid > 1) or not np.all(np.isfinite(grid)):
            raise DomainError("reflectivities must lie in [0, 1]")
        grid.setflags(write=False)
        object.__setattr__(self, "eta_at", grid)

    @property
    def height(self) -> int:
        return self.eta_at.shape[0]

    @property
    def width(self) -> int:
        return self.eta_at.shape[1]

    @property
    def truth(self) -> np.ndarray:
        return self.eta_at > 0

    @classmethod
    def checkerboard(cls, width: int, height: int, low: float = 0.0,
                     high: float = 0.1) -> "ReflectivityMap":
        y, x = np.indices((height, width))
        return cls(np.where((x + y) % 2 == 0, low, high))


@dataclass(frozen=True)
class ImagingConfig:
    shots_per_pixel: int
    b: float
    d: int = 1
    kind: Kind = Kind.UNENTANGLED
    threshold: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.shots_per_pixel < 1:
            raise DomainError(f"shots_per_pixel must be >= 1, got {self.shots_per_pixel}")
        if not 0.0 < self.threshold < 1.0:
            raise DomainError(f"threshold must lie in (0, 1), got {self.threshold}")
        object.__setattr__(self, "kind", Kind(self.kind))


@dataclass(frozen=True, eq=False)
class ImageResult:
    detected: np.ndarray
    yes_fraction: np.ndarray
    pixel_error_rate: float


def pixel_model(eta: float, config: ImagingConfig) -> TrialOutcomeModel:
    return conditional_probs(ScenarioParams(eta=float(eta), b=config.b, d=config.d), config.kind)


def scan_image(image: ReflectivityMap, config: ImagingConfig) -> ImageResult:
    """Raster-scan the map with ``shots_per_pixel`` shots at every pixel.

    A pixel is declared lit when its fraction of 'yes' shots exceeds
    ``config.threshold``. Pixel ``(row, col)`` draws from the stream
    ``(seed, row*width + col)``.
    """
    h, w = image.height, image.width
    n = config.shots_per_pixel
    counts = np.zeros((h, w), dtype=np.int64)
    offending = []
    for row in range(h):
        for col in range(w):
            eta = image.eta_at[row, col]
            model = pixel_model(eta, config)
            if eta > 0 and not (model.p_yes_given_absent < config.threshold
                                < model.p_yes_given_present):
                offending.append((row, col))
            rng = replica_rng(config.seed, row * w + col)
            counts[row, col] = rng.binomial(n, model.p_yes_given_present)
    if offending:
        shown = ", ".join(map(str, offending[:10]))
        more = f" (+{len(offending) - 10} more)" if len(offending) > 10 else ""
        warnings.warn(
            f"threshold {config.threshold} does not separate the hypotheses at "
            f"pixels {shown}{more}",
            ImagingConfigWarning,
            stacklevel=2,
        )
    frac = counts / n
    detected = frac > config.threshold
    error_rate = float(np.count_nonzero(detected != image.truth)) / image.eta_at.size
    return ImageResult(detected, frac, error_rate)


def false_alarm_threshold(shots: int, p_absent: float, false_alarm: float) -> float:
    """Yes-fraction threshold with ``P(count > k) <= false_alarm`` under the
    absent hypothesis, for the smallest such integer ``k``.

    The threshold sits halfway between ``k`` and ``k + 1`` counts.
    """
    if not 0.0 < false_alarm < 1.0:
        raise DomainError(f"false-alarm budget must lie in (0, 1), got {false_alarm}")
    ks = np.arange(shots + 1)
    ok = stats.binom.sf(ks, shots, p_absent) <= false_alarm
    k = int(ks[np.argmax(ok)])
    return (k + 0.5) / shots


def detection_power(shots: int, p_absent: float, p_present: float, false_alarm: float) -> float:
    """Exact probability of declaring a lit pixel lit at a matched false-alarm budget."""
    k = math.floor(false_alarm_threshold(shots, p_absent, false_alarm) * shots)
    return float(stats.binom.sf(k, shots, p_present))


@dataclass(frozen=True, eq=False)
class ModeComparison:
    unentangled: ImageResult
    entangled: ImageResult
    shots_unentangled: int
    shots_entangled: int
    threshold_unentangled: float
    threshold_entangled: float
    false_alarm: float

    @property
    def difference(self) -> float:
        """Entangled minus unentangled pixel error rate."""
        return self.entangled.pixel_error_rate - self.unentangled.pixel_error_rate

    @property
    def sigma(self) -> float:
        n = self.unentangled.detected.size
        eu = self.unentangled.pixel_error_rate
        ee = self.entangled.pixel_error_rate
        return math.sqrt((eu * (1 - eu) + ee * (1 - ee)) / n)

    @property
    def within_3sigma(self) -> bool:
        return abs(self.difference) <= 3.0 * self.sigma


def compare_modes(image: ReflectivityMap, b: float, d: int, shots_unentangled: int,
                  seed: int, false_alarm: float = 0.01,
                  shots_entangled: Optional[int] = None) -> ModeComparison:
    """Image the map unentangled with ``n`` shots per pixel and entangled
    with ``ceil(n/d)`` shots, each thresholded at the same false-alarm budget."""
    if shots_unentangled < d:
        raise DomainError(f"shots_unentangled ({shots_unentangled}) must be >= d ({d})")
    n_e = math.ceil(shots_unentangled / d) if shots_entangled is None else shots_entangled
    params = ScenarioParams(eta=0.0, b=b, d=d)
    p0_u = conditional_probs(params, Kind.UNENTANGLED).p_yes_given_absent
    p0_e = conditional_probs(params, Kind.ENTANGLED).p_yes_given_absent
    th_u = false_alarm_threshold(shots_unentangled, p0_u, false_alarm)
    th_e = false_alarm_threshold(n_e, p0_e, false_alarm)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ImagingConfigWarning)
        res_u = scan_image(image, ImagingConfig(shots_unentangled, b, d, Kind.UNENTANGLED, th_u, seed))
        res_e = scan_image(image, ImagingConfig(n_e, b, d, Kind.ENTANGLED, th_e, seed))
    return ModeComparison(res_u, res_e, shots_unentangled, n_e, th_u, th_e, false_alarm)
