"""Model potentials: box wells, radial power laws, and tabulated 1-D profiles.

Every potential is non-negative on the closure of its domain. Units follow the
package convention k_B = 1 (so beta = 1/T) and the default particle mass is 1;
nothing else in the package hard-codes either choice.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError


class PotentialKind(enum.Enum):
    BOX = "box"
    HOMOGENEOUS = "homogeneous"
    TABULATED = "tabulated"


class ScalingExponents(NamedTuple):
    """Exponents attached to a radial power-law potential V(r) = r^nu.

    substitution: the coordinate-substitution exponent 2/(2+nu).
    energy: the level-scaling exponent 2*nu/(2+nu), i.e. E_n(h) = h^energy * E_n(1).

    The two are distinct quantities and are never interchangeable.
    """

    substitution: float
    energy: float


def scaling_exponents(nu: float) -> ScalingExponents:
    """Exponents (2/(2+nu), 2*nu/(2+nu)) for a power-law potential r^nu."""
    if nu <= 0.0:
        raise ValueError("exponent nu must be positive")
    sub = 2.0 / (2.0 + nu)
    return ScalingExponents(sub, nu * sub)


@dataclass(frozen=True)
class Potential:
    """A model potential with its domain and scaling metadata.

    kind      : BOX (V = 0 on a rectangular box), HOMOGENEOUS (V(r) = r^nu on
                all of R^N), or TABULATED (piecewise-linear samples on an
                interval, dimension 1).
    dimension : coordinate-space dimension N.
    mass      : particle mass m > 0.
    lengths   : per-axis box lengths (BOX only).
    exponent  : power nu > 0 (HOMOGENEOUS only).
    grid_x/grid_v : strictly increasing sample positions and values
                (TABULATED only).
    """

    kind: PotentialKind
    dimension: int
    mass: float = 1.0
    lengths: tuple[float, ...] | None = None
    exponent: float | None = None
    grid_x: np.ndarray | None = None
    grid_v: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.kind is PotentialKind.BOX:
            if self.lengths is None or len(self.lengths) != self.dimension:
                raise ValueError("box potential needs one length per axis")
            if any(L <= 0.0 for L in self.lengths):
                raise ValueError("box lengths must be positive")
        elif self.kind is PotentialKind.HOMOGENEOUS:
            if self.exponent is None or self.exponent <= 0.0:
                raise ValueError("exponent nu must be positive")
        elif self.kind is PotentialKind.TABULATED:
            if self.dimension != 1:
                raise ValueError("tabulated potentials are one-dimensional")
            xs = np.asarray(self.grid_x, dtype=float)
            vs = np.asarray(self.grid_v, dtype=float)
            if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
                raise ValueError("tabulated grid needs matching 1-D x and V arrays")
            if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vs)):
                raise ValueError("tabulated samples must be finite")
            if np.any(np.diff(xs) <= 0.0):
                raise ValueError("tabulated x values must be strictly increasing")
            if np.any(vs < 0.0):
                raise ValueError("tabulated potential values must be non-negative")
            xs.setflags(write=False)
            vs.setflags(write=False)
            object.__setattr__(self, "grid_x", xs)
            object.__setattr__(self, "grid_v", vs)


def box(lengths: Sequence[float], mass: float = 1.0) -> Potential:
    """Box well: V = 0 inside the rectangle [0, L_1] x ... x [0, L_N]."""
    lengths = tuple(float(L) for L in lengths)
    return Potential(PotentialKind.BOX, len(lengths), mass, lengths=lengths)


def homogeneous(nu: float, dimension: int = 1, mass: float = 1.0) -> Potential:
    """Radial power law V(r) = r^nu on all of R^N."""
    if nu <= 0.0:
        raise ValueError("exponent nu must be positive")
    return Potential(PotentialKind.HOMOGENEOUS, dimension, mass, exponent=float(nu))


def tabulated(xs: Iterable[float], vs: Iterable[float], mass: float = 1.0) -> Potential:
    """Piecewise-linear potential from samples (xs, vs) on an interval."""
    return Potential(
        PotentialKind.TABULATED,
        1,
        mass,
        grid_x=np.asarray(list(xs), dtype=float),
        grid_v=np.asarray(list(vs), dtype=float),
    )


def volume(potential: Potential) -> float:
    """Volume of a box potential's domain."""
    if potential.kind is not PotentialKind.BOX:
        raise ValueError("volume is defined for box potentials only")
    return float(np.prod(potential.lengths))


def evaluate(potential: Potential, x) -> float:
    """V(x) for a point x in the closure of the domain.

    Box wells return 0 and reject points outside the box; power laws return
    r^nu with r the Euclidean norm; tabulated potentials interpolate linearly
    and reject points outside the sampled interval.
    """
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (potential.dimension,):
        raise ValueError(
            f"point has shape {pt.shape}, expected ({potential.dimension},)"
        )
    if potential.kind is PotentialKind.BOX:
        for xi, L in zip(pt, potential.lengths):
            if not (0.0 <= xi <= L):
                raise DomainError(f"point {x} outside the box domain")
        return 0.0
    if potential.kind is PotentialKind.HOMOGENEOUS:
        r = float(np.linalg.norm(pt))
        return r ** potential.exponent
    xs = potential.grid_x
    xi = float(pt[0])
    if not (xs[0] <= xi <= xs[-1]):
        raise DomainError(f"point {xi} outside the tabulated range [{xs[0]}, {xs[-1]}]")
    return float(np.interp(xi, xs, potential.grid_v))


def check_homogeneity(
    potential: Potential,
    scales: Sequence[float],
    samples: Sequence,
    nu: float | None = None,
) -> float:
    """Worst relative defect of V(h*x) = h^nu V(x) over the given scales and samples.

    For exact power laws this is zero up to round-off. Tabulated potentials
    carry no exponent of their own, so `nu` must be supplied for them.
    """
    if potential.kind is PotentialKind.BOX:
        raise ValueError("check_homogeneity applies to homogeneous or tabulated potentials")
    if len(scales) == 0 or len(samples) == 0:
        raise ValueError("check_homogeneity needs at least one scale and one sample")
    if nu is None:
        nu = potential.exponent
    if nu is None:
        raise ValueError("nu is required for tabulated potentials")
    worst = 0.0
    for s in scales:
        if s <= 0.0:
            raise ValueError("scales must be positive")
        for x in samples:
            pt = np.atleast_1d(np.asarray(x, dtype=float))
            ref = (s**nu) * evaluate(potential, pt)
            got = evaluate(potential, s * pt)
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return worst


def load_tabulated_csv(path: str | Path, mass: float = 1.0) -> Potential:
    """Load a tabulated potential from a two-column CSV with header ``x,V``."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["x", "V"]:
            raise ValueError(f"{path}: expected header 'x,V'")
        xs: list[float] = []
        vs: list[float] = []
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: malformed row {row!r}")
            xs.append(float(row[0]))
            vs.append(float(row[1]))
    return tabulated(xs, vs, mass=mass)


def save_tabulated_csv(potential: Potential, path: str | Path) -> None:
    """Write a tabulated potential back to ``x,V`` CSV form."""
    if potential.kind is not PotentialKind.TABULATED:
        raise ValueError("only tabulated potentials serialize to x,V CSV")
    path = Path(path)
    from .util import fmt17

    with path.open("w", newline="") as fh:
        fh.write("x,V\n")
        for xi, vi in zip(potential.grid_x, potential.grid_v):
            fh.write(f"{fmt17(xi)},{fmt17(vi)}\n")


def grows_unboundedly(potential: Potential, radius: float = 1.0, factor: float = 2.0) -> bool:
    """Spot-check that V increases beyond `radius` (confinement on unbounded domains)."""
    if potential.kind is PotentialKind.BOX:
        return True  # bounded domain, nothing to check
    if potential.kind is PotentialKind.HOMOGENEOUS:
        base = np.zeros(potential.dimension)
        base[0] = radius
        return evaluate(potential, factor * base) > evaluate(potential, base)
    return bool(potential.grid_v[-1] >= potential.grid_v.max() * 0.5)
