"""
Numerical core for a single neural field

The field obeys

    tau * du/dt(x, t) = -u(x, t) + sum_y w(x - y) u(y, t) - g * sum_y u(y, t) + I(x, t) + h

integrated with forward Euler and clamped to [u_min, u_max] after every step.
The lateral weights w are a truncated difference of gaussians applied as a 2D
convolution with a zero-padded boundary; g is a uniform global inhibition.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import ndimage, signal

from src.errors import InvalidParameterError, StabilityError

logger = logging.getLogger(__name__)

Location = Tuple[float, float]


@dataclass(frozen=True)
class Grid:
    width: int = 40
    height: int = 40

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise InvalidParameterError(f"grid must be at least 1 x 1, got {self.width} x {self.height}")

    @property
    def shape(self) -> Tuple[int, int]:
        """Array shape (rows, columns) = (height, width)"""
        return (self.height, self.width)

    @property
    def center(self) -> Tuple[int, int]:
        """Foveal cell (x, y)"""
        return (self.width // 2, self.height // 2)

    @property
    def size(self) -> int:
        return self.width * self.height

    def contains(self, x: float, y: float) -> bool:
        """
        Whether a continuous position lies on the grid

        Cells sit at integer coordinates, so the grid spans [0, width - 1] x
        [0, height - 1].

        Args:
            x: Column coordinate
            y: Row coordinate

        Returns:
            bool: True inside the grid, edges included
        """
        return 0 <= x <= self.width - 1 and 0 <= y <= self.height - 1


@dataclass(frozen=True)
class StepParams:
    dt: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")

    def check(self, name: str, tau: float) -> float:
        """Return dt/tau, raising StabilityError when it is not below 1"""
        ratio = self.dt / tau
        if ratio >= 1.0:
            raise StabilityError(name, self.dt, tau)
        return ratio


@dataclass
class FieldMap:
    grid: Grid
    u: np.ndarray
    tau: float = 10.0
    bounds: Tuple[float, float] = (0.0, 1.0)
    # scalar or per-cell array
    resting_level: Union[float, np.ndarray] = 0.0
    name: str = ""

    @classmethod
    def zeros(cls, grid: Grid, tau: float = 10.0, **kwargs) -> "FieldMap":
        """A map at rest on `grid`; extra keyword arguments go to the constructor"""
        return cls(grid=grid, u=np.zeros(grid.shape, dtype=np.float64), tau=tau, **kwargs)

    @property
    def u_min(self) -> float:
        return self.bounds[0]

    @property
    def u_max(self) -> float:
        return self.bounds[1]

    def with_activity(self, u: np.ndarray) -> "FieldMap":
        """Copy with activity `u`, clamped to the bounds"""
        u = np.asarray(u, dtype=np.float64)
        if u.shape != self.grid.shape:
            raise InvalidParameterError(f"activity shape {u.shape} does not match grid {self.grid.shape}")
        return replace(self, u=np.clip(u, self.u_min, self.u_max))


@dataclass(frozen=True, eq=False)
class LateralKernel:
    """
    Tabulated lateral weights; table[r + dy, r + dx] = w(dx, dy)

    global_inhibition subtracts g * (total activity) from every cell, so two
    bubbles compete at any distance on the grid.
    """

    a_exc: float
    sigma_exc: float
    a_inh: float
    sigma_inh: float
    radius: int
    table: np.ndarray
    global_inhibition: float = 0.0

    @classmethod
    def null(cls, radius: int = 1) -> "LateralKernel":
        """A kernel with all-zero weights"""
        size = 2 * radius + 1
        return cls(0.0, 1.0, 0.0, 2.0, radius, np.zeros((size, size)))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.table) and self.global_inhibition == 0.0

    def weight(self, dx: int, dy: int) -> float:
        """Local weight w(dx, dy); zero beyond the radius"""
        r = self.radius
        if abs(dx) > r or abs(dy) > r:
            return 0.0
        return float(self.table[r + dy, r + dx])


def make_dog_kernel(a_exc: float, sigma_exc: float, a_inh: float, sigma_inh: float,
                    radius: int, global_inhibition: float = 0.0) -> LateralKernel:
    """
    Tabulate a difference of gaussians

    w(d) = a_exc * exp(-|d|^2 / (2 sigma_exc^2)) - a_inh * exp(-|d|^2 / (2 sigma_inh^2))
    for every offset with |dx| <= radius and |dy| <= radius.

    Args:
        a_exc: Excitatory amplitude, > 0
        sigma_exc: Excitatory width in cells
        a_inh: Local inhibitory amplitude, >= 0
        sigma_inh: Inhibitory width, wider than sigma_exc
        radius: Half-size of the table in cells, >= 1
        global_inhibition: Uniform inhibition per unit of total activity, >= 0

    Returns:
        LateralKernel: The tabulated kernel
    """
    if not a_exc > 0:
        raise InvalidParameterError(f"a_exc must be positive, got {a_exc}")
    if a_inh < 0:
        raise InvalidParameterError(f"a_inh must be non-negative, got {a_inh}")
    if not sigma_exc > 0:
        raise InvalidParameterError(f"sigma_exc must be positive, got {sigma_exc}")
    if not sigma_inh > sigma_exc:
        raise InvalidParameterError(f"sigma_inh ({sigma_inh}) must exceed sigma_exc ({sigma_exc})")
    if int(radius) < 1:
        raise InvalidParameterError(f"radius must be >= 1, got {radius}")
    if not (global_inhibition >= 0 and np.isfinite(global_inhibition)):
        raise InvalidParameterError(f"global_inhibition must be a non-negative number, got {global_inhibition}")

    radius = int(radius)
    offsets = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(offsets, offsets, indexing='ij')
    d2 = (dx * dx + dy * dy).astype(np.float64)
    table = (a_exc * np.exp(-d2 / (2.0 * sigma_exc ** 2))
             - a_inh * np.exp(-d2 / (2.0 * sigma_inh ** 2)))
    return LateralKernel(float(a_exc), float(sigma_exc), float(a_inh), float(sigma_inh), radius, table,
                         float(global_inhibition))


def lateral_term(field: FieldMap, kernel: Optional[LateralKernel]) -> np.ndarray:
    """L(x) = sum over grid cells y of w(x - y) u(y), zero outside the grid, minus g * sum u"""
    if kernel is None or kernel.is_zero:
        return np.zeros(field.grid.shape, dtype=np.float64)
    local = signal.convolve2d(field.u, kernel.table, mode='same', boundary='fill', fillvalue=0.0)
    if kernel.global_inhibition:
        local = local - kernel.global_inhibition * float(field.u.sum())
    return local


def euler_step(field: FieldMap, input: np.ndarray, kernel: Optional[LateralKernel],
               params: StepParams) -> FieldMap:
    """Advance one forward-Euler step and return the new field; the argument is untouched"""
    ratio = params.check(field.name or "field", field.tau)
    input = np.asarray(input, dtype=np.float64)
    if input.shape != field.grid.shape:
        raise InvalidParameterError(f"input shape {input.shape} does not match grid {field.grid.shape}")
    if not np.all(np.isfinite(input)):
        raise InvalidParameterError(f"non-finite input to field '{field.name}'")

    drive = -field.u + lateral_term(field, kernel) + input + field.resting_level
    u = np.clip(field.u + ratio * drive, field.u_min, field.u_max)
    return replace(field, u=u)


@dataclass(frozen=True)
class Peak:
    location: Location
    amplitude: float


def _components(u: np.ndarray, threshold: float):
    return ndimage.label(u >= threshold)


def _centroid(u: np.ndarray, labels: np.ndarray, index: int) -> Location:
    row, col = ndimage.center_of_mass(u, labels, index)
    return (float(col), float(row))


def decode_peak(field: FieldMap, threshold: float) -> Optional[Peak]:
    """Centroid of the above-threshold component holding the global maximum"""
    u = field.u
    amplitude = float(u.max())
    if amplitude < threshold:
        return None
    labels, _ = _components(u, threshold)
    row, col = np.unravel_index(int(np.argmax(u)), u.shape)
    return Peak(_centroid(u, labels, int(labels[row, col])), amplitude)


def count_bubbles(field: FieldMap, threshold: float) -> List[Peak]:
    """All above-threshold components, strongest first"""
    u = field.u
    labels, count = _components(u, threshold)
    peaks = []
    for index in range(1, count + 1):
        amplitude = float(u[labels == index].max())
        peaks.append(Peak(_centroid(u, labels, index), amplitude))
    peaks.sort(key=lambda p: (-p.amplitude, p.location[1], p.location[0]))
    return peaks


def gaussian_bubble(grid: Grid, center: Location, sigma: float, amplitude: float = 1.0) -> np.ndarray:
    """amplitude * exp(-|x - center|^2 / (2 sigma^2)) sampled on the grid"""
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    ys, xs = np.indices(grid.shape, dtype=np.float64)
    d2 = (xs - center[0]) ** 2 + (ys - center[1]) ** 2
    return amplitude * np.exp(-d2 / (2.0 * sigma ** 2))
