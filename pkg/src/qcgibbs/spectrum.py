"""Discrete spectra of confined Schrödinger operators -(h^2/2m) u'' + V u.

Levels come from closed forms where they exist (box multi-index sums, the r^2
oscillator, the |x| wedge via Airy-function zeros) and otherwise from a
second-order central finite-difference discretization on a uniform grid with
Dirichlet ends, sharpened by Richardson extrapolation. A power-law growth
model E_n ~ C n^gamma fitted to the top quartile of the computed levels
bounds the Boltzmann tail left out by truncation, and the exact scaling law
E_n(h) = h^a E_n(1) transports a base spectrum across Planck parameters.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special as sc
from scipy.linalg import eigvalsh_tridiagonal

from .errors import (
    AccuracyError,
    ContractError,
    ResourceError,
    TailModelError,
)
from .potential import Potential, PotentialKind
from .util import fmt17, log_upper_gamma


class SpectrumSource(enum.Enum):
    ANALYTIC_BOX = "analytic_box"
    ANALYTIC_HARMONIC = "analytic_harmonic"
    ANALYTIC_AIRY = "analytic_airy"
    FINITE_DIFFERENCE = "finite_difference"
    RESCALED = "rescaled"


@dataclass(frozen=True)
class Spectrum:
    """An ordered list of positive eigenvalues at one Planck parameter.

    levels       : E_1 <= E_2 <= ... <= E_M, strictly positive.
    planck       : the h at which the levels hold.
    source       : how the levels were produced.
    level_errors : absolute per-level error estimates (None for analytic levels).
    tail_model   : (gamma, C) of the fitted growth law E_n ~ C n^gamma, used to
                   bound the omitted tail; fitted from the top quartile when at
                   least 8 levels are present.
    """

    levels: np.ndarray
    planck: float
    source: SpectrumSource
    level_errors: np.ndarray | None = None
    tail_model: tuple[float, float] | None = field(default=None)

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size < 1:
            raise ValueError("levels must be a non-empty 1-D array")
        if not np.all(np.isfinite(levels)):
            raise ValueError("levels must be finite")
        if levels[0] <= 0.0:
            raise ValueError("levels must be strictly positive")
        if np.any(np.diff(levels) < 0.0):
            raise ValueError("levels must be non-decreasing")
        if self.planck <= 0.0:
            raise ValueError("planck must be positive")
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        if self.level_errors is not None:
            errs = np.asarray(self.level_errors, dtype=float)
            if errs.shape != levels.shape:
                raise ValueError("level_errors must match levels in shape")
            errs.setflags(write=False)
            object.__setattr__(self, "level_errors", errs)
        if self.tail_model is None and levels.size >= 8:
            object.__setattr__(self, "tail_model", fit_tail_model(levels))

    @property
    def count(self) -> int:
        return int(self.levels.size)


def fit_tail_model(levels: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of log E_n = log C + gamma log n on the top quartile."""
    levels = np.asarray(levels, dtype=float)
    m = levels.size
    lo = max(3 * m // 4, 0)
    if m - lo < 4:
        lo = max(m - 4, 0)
    n = np.arange(lo + 1, m + 1, dtype=float)
    y = np.log(levels[lo:])
    A = np.column_stack([np.ones_like(n), np.log(n)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[1]), float(math.exp(coef[0]))


# ---------------------------------------------------------------------------
# analytic spectra


def solve_box(
    dimension: int,
    lengths,
    mass: float = 1.0,
    planck: float = 1.0,
    count: int = 1,
    max_states: int = 2_000_000,
) -> Spectrum:
    """The `count` smallest box levels (h^2 pi^2 / 2m) * sum_i (n_i/L_i)^2.

    Multi-indices run over positive integers; degenerate levels appear with
    multiplicity. Enumeration beyond `max_states` raises ResourceError.
    """
    lengths = tuple(float(L) for L in np.atleast_1d(lengths))
    if len(lengths) != dimension:
        raise ValueError("need one length per axis")
    if any(L <= 0.0 for L in lengths):
        raise ValueError("box lengths must be positive")
    if count < 1:
        raise ValueError("count must be at least 1")
    if mass <= 0.0 or planck <= 0.0:
        raise ValueError("mass and planck must be positive")
    if count > max_states:
        raise ResourceError(
            f"requested {count} box states exceeds the enumeration cap {max_states}"
        )
    coeff = np.array([(planck * math.pi / L) ** 2 / (2.0 * mass) for L in lengths])
    if dimension == 1:
        n = np.arange(1, count + 1, dtype=float)
        return Spectrum(coeff[0] * n**2, planck, SpectrumSource.ANALYTIC_BOX)

    # lattice expansion from (1,...,1): pop the smallest value, push successors
    start = tuple([1] * dimension)
    heap: list[tuple[float, tuple[int, ...]]] = [(float(coeff.sum()), start)]
    seen = {start}
    out = np.empty(count)
    popped = 0
    while popped < count:
        if len(seen) > max_states:
            raise ResourceError(
                f"box enumeration exceeded the cap of {max_states} states"
            )
        value, idx = heapq.heappop(heap)
        out[popped] = value
        popped += 1
        for axis in range(dimension):
            nxt = list(idx)
            nxt[axis] += 1
            key = tuple(nxt)
            if key not in seen:
                seen.add(key)
                val = float(np.dot(coeff, np.square(nxt)))
                heapq.heappush(heap, (val, key))
    return Spectrum(out, planck, SpectrumSource.ANALYTIC_BOX)


def oscillator_spectrum(count: int, mass: float = 1.0, planck: float = 1.0) -> Spectrum:
    """Analytic levels of -(h^2/2m) u'' + x^2 u on the line.

    Writing x^2 = (1/2) m w^2 x^2 gives w = sqrt(2/m), so
    E_n = h w (n - 1/2), n = 1, 2, ...
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    omega = math.sqrt(2.0 / mass)
    n = np.arange(1, count + 1, dtype=float)
    return Spectrum(planck * omega * (n - 0.5), planck, SpectrumSource.ANALYTIC_HARMONIC)


def wedge_spectrum(count: int, mass: float = 1.0, planck: float = 1.0) -> Spectrum:
    """Analytic levels of -(h^2/2m) u'' + |x| u on the line via Airy zeros.

    Even eigenfunctions satisfy u'(0) = 0 and give E = |a'_k| s, odd ones
    satisfy u(0) = 0 and give E = |a_k| s, with s = (h^2 / 2m)^(1/3); the two
    ladders interleave strictly.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    scale = (planck**2 / (2.0 * mass)) ** (1.0 / 3.0)
    half = (count + 1) // 2
    a, ap, _, _ = sc.ai_zeros(half)
    levels = np.empty(count)
    levels[0::2] = np.abs(ap)[: (count + 1) // 2]
    levels[1::2] = np.abs(a)[: count // 2]
    return Spectrum(levels * scale, planck, SpectrumSource.ANALYTIC_AIRY)


# ---------------------------------------------------------------------------
# finite differences


def _domain_interval(potential: Potential, half_width: float | None) -> tuple[float, float]:
    if potential.kind is PotentialKind.BOX:
        return 0.0, potential.lengths[0]
    if potential.kind is PotentialKind.TABULATED:
        return float(potential.grid_x[0]), float(potential.grid_x[-1])
    if half_width is None or half_width <= 0.0:
        raise ValueError("homogeneous potentials need a positive half-width R")
    return -float(half_width), float(half_width)


def _potential_values(potential: Potential, xs: np.ndarray) -> np.ndarray:
    if potential.kind is PotentialKind.BOX:
        return np.zeros_like(xs)
    if potential.kind is PotentialKind.HOMOGENEOUS:
        return np.abs(xs) ** potential.exponent
    return np.interp(xs, potential.grid_x, potential.grid_v)


def fd_eigenvalues(
    potential: Potential,
    planck: float = 1.0,
    half_width: float | None = None,
    points: int = 2000,
    mass: float | None = None,
    count: int = 1,
) -> np.ndarray:
    """Lowest `count` eigenvalues of the tridiagonal discretization on one grid.

    `points` interior nodes with Dirichlet values at both interval ends; this
    is the raw second-order scheme without extrapolation.
    """
    if potential.dimension != 1:
        raise ValueError("the finite-difference solver is one-dimensional")
    if count < 1 or count > points:
        raise ValueError("need 1 <= count <= points")
    m = potential.mass if mass is None else float(mass)
    a, b = _domain_interval(potential, half_width)
    dx = (b - a) / (points + 1)
    xs = a + dx * np.arange(1, points + 1)
    kin = planck**2 / (m * dx**2)
    diag = kin + _potential_values(potential, xs)
    off = np.full(points - 1, -0.5 * kin)
    return eigvalsh_tridiagonal(
        diag, off, select="i", select_range=(0, count - 1),
        check_finite=False, lapack_driver="stebz",
    )


def _weyl_integral(nu: float) -> float:
    # int_0^1 sqrt(1 - u^nu) du
    return 0.5 * math.sqrt(math.pi) * math.gamma(1.0 + 1.0 / nu) / math.gamma(1.5 + 1.0 / nu)


def weyl_level_count(nu: float, mass: float, planck: float, energy: float) -> float:
    """Semiclassical count of levels of -(h^2/2m)u'' + |x|^nu u below `energy`."""
    if energy <= 0.0:
        return 0.0
    pref = 2.0 * math.sqrt(2.0 * mass) / (math.pi * planck) * _weyl_integral(nu)
    return pref * energy ** (0.5 + 1.0 / nu)


def weyl_energy(nu: float, mass: float, planck: float, count: int) -> float:
    """Inverse of weyl_level_count: rough energy of level number `count`."""
    pref = 2.0 * math.sqrt(2.0 * mass) / (math.pi * planck) * _weyl_integral(nu)
    return (count / pref) ** (1.0 / (0.5 + 1.0 / nu))


def _auto_grid(potential: Potential, planck: float, mass: float, count: int) -> tuple[float | None, int]:
    if potential.kind is PotentialKind.HOMOGENEOUS:
        nu = potential.exponent
        e_top = weyl_energy(nu, mass, planck, count) * 1.3 + 10.0
        half_width = (1.25 * e_top + 10.0) ** (1.0 / nu)
        k_top = math.sqrt(2.0 * mass * e_top) / planck
        span = 2.0 * half_width
        points = max(1500, int(math.ceil(span * k_top / 0.33)))
        return half_width, points
    # box or tabulated: the interval is fixed by the potential
    a, b = _domain_interval(potential, None)
    if potential.kind is PotentialKind.BOX:
        points = max(1500, 12 * count)
    else:
        vmax = float(potential.grid_v.max())
        k_top = math.sqrt(2.0 * mass * (vmax + weyl_energy(2.0, mass, planck, count) + 10.0)) / planck
        points = max(1500, int(math.ceil((b - a) * k_top / 0.33)), 12 * count)
    return None, points


def solve_fd_1d(
    potential: Potential,
    planck: float = 1.0,
    grid: tuple[float | None, int] | None = None,
    mass: float | None = None,
    count: int = 1,
    refinements: int = 1,
    accuracy_rtol: float | None = None,
) -> Spectrum:
    """Finite-difference levels with Richardson-extrapolated error control.

    grid = (half_width, points): half_width fixes the Dirichlet walls at +-R
    for potentials on the whole line (ignored for box and tabulated domains,
    which carry their own interval); `points` is the interior node count of
    the coarsest grid. With grid=None both are sized heuristically so that the
    walls sit where V exceeds the top requested level by a 25% margin plus 10
    energy units and the top level is still resolved.

    The scheme is solved on `points` and 2*points+1 nodes (and 4*points+3 when
    refinements=2); levels are Richardson extrapolations and level_errors hold
    the per-level estimates from the final extrapolation step. If
    `accuracy_rtol` is given, any level whose estimate exceeds
    accuracy_rtol * max(|E|, 1) raises AccuracyError naming the level.
    """
    if refinements not in (1, 2):
        raise ValueError("refinements must be 1 or 2")
    m = potential.mass if mass is None else float(mass)
    auto = grid is None
    if auto:
        half_width, points = _auto_grid(potential, planck, m, count)
    else:
        half_width, points = grid
        points = int(points)
        if half_width is not None:
            half_width = float(half_width)

    for _attempt in range(4):
        e0 = fd_eigenvalues(potential, planck, half_width, points, m, count)
        e1 = fd_eigenvalues(potential, planck, half_width, 2 * points + 1, m, count)
        r1 = (4.0 * e1 - e0) / 3.0
        if refinements == 1:
            value = r1
            estimate = np.abs(e1 - e0) / 3.0
            n_fine = 2 * points + 1
        else:
            e2 = fd_eigenvalues(potential, planck, half_width, 4 * points + 3, m, count)
            r1b = (4.0 * e2 - e1) / 3.0
            value = (16.0 * r1b - r1) / 15.0
            estimate = np.abs(r1b - r1)
            n_fine = 4 * points + 3
        a, b = _domain_interval(potential, half_width)
        dx_fine = (b - a) / (n_fine + 1)
        norm_t = planck**2 / (m * dx_fine**2)
        estimate = estimate + 5e-14 * (np.abs(value) + norm_t)

        if not auto or potential.kind is not PotentialKind.HOMOGENEOUS:
            break
        # wall-placement rule: V(R) must clear the top level by 25% plus 10
        nu = potential.exponent
        needed = 1.25 * float(value[-1]) + 10.0
        if nu * math.log(half_width) >= math.log(needed):
            break
        half_width *= 1.4
    else:
        raise AccuracyError("could not place the domain walls after 4 attempts")

    # extrapolation can jitter near-degenerate pairs below estimate size
    order = np.argsort(value, kind="stable")
    value = value[order]
    estimate = estimate[order]
    if accuracy_rtol is not None:
        rel = estimate / np.maximum(np.abs(value), 1.0)
        bad = int(np.argmax(rel))
        if rel[bad] > accuracy_rtol:
            raise AccuracyError(
                f"level {bad + 1}: Richardson error estimate {estimate[bad]:.3e} "
                f"exceeds tolerance {accuracy_rtol:.1e} * max(|E|, 1)"
            )
    return Spectrum(value, planck, SpectrumSource.FINITE_DIFFERENCE, level_errors=estimate)


# ---------------------------------------------------------------------------
# rescaling and tails


def rescale(base: Spectrum, planck: float, exponent: float) -> Spectrum:
    """Transport a base spectrum at h = 1 to h = planck via E_n(h) = h^a E_n(1)."""
    if base.source is SpectrumSource.RESCALED:
        raise ContractError("rescale requires an unrescaled base spectrum")
    if base.planck != 1.0:
        raise ContractError("rescale requires the base spectrum at h = 1")
    if planck <= 0.0:
        raise ValueError("planck must be positive")
    if exponent <= 0.0:
        raise ValueError("scaling exponent must be positive")
    factor = planck**exponent
    errs = None if base.level_errors is None else base.level_errors * factor
    tail = None
    if base.tail_model is not None:
        gamma, pref = base.tail_model
        tail = (gamma, pref * factor)
    return Spectrum(
        base.levels * factor, planck, SpectrumSource.RESCALED,
        level_errors=errs, tail_model=tail,
    )


def log_tail_bound(spectrum: Spectrum, beta: float, power: int = 0) -> float:
    """log of an upper bound on sum_{n>M} E_n^power exp(-beta E_n).

    Uses the fitted growth law E_n ~ C n^gamma and the integral comparison
    sum_{n>M} f(n) <= int_M^inf f(t) dt (valid once the summand decreases,
    i.e. beta E_M > power, which holds in every gated use).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if spectrum.count < 8 or spectrum.tail_model is None:
        raise ValueError("tail_bound needs a spectrum with at least 8 levels")
    gamma, pref = spectrum.tail_model
    if gamma <= 0.0:
        raise TailModelError(
            f"fitted growth exponent {gamma:.3g} is not positive; "
            "the spectrum does not grow"
        )
    u_m = beta * pref * spectrum.count**gamma
    return (
        -math.log(gamma)
        - math.log(beta * pref) / gamma
        - power * math.log(beta)
        + log_upper_gamma(power + 1.0 / gamma, u_m)
    )


def tail_bound(spectrum: Spectrum, beta: float) -> float:
    """Upper bound on the omitted Boltzmann tail sum_{n>M} exp(-beta E_n).

    Monotone non-increasing in beta; may underflow to 0 for very cold tails.
    """
    return float(math.exp(min(log_tail_bound(spectrum, beta, 0), 700.0)))


# ---------------------------------------------------------------------------
# serialization


def spectrum_to_csv(spectrum: Spectrum, path: str | Path) -> None:
    """Write ``n,E`` rows with ``# h=`` and ``# source=`` metadata comments."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# h={fmt17(spectrum.planck)}\n")
        fh.write(f"# source={spectrum.source.value}\n")
        fh.write("n,E\n")
        for i, e in enumerate(spectrum.levels, start=1):
            fh.write(f"{i},{fmt17(e)}\n")


def spectrum_from_csv(path: str | Path) -> Spectrum:
    """Read a spectrum written by spectrum_to_csv, validating order and positivity."""
    path = Path(path)
    planck = None
    source = None
    levels: list[float] = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                key = key.strip()
                if key == "h":
                    planck = float(val)
                elif key == "source":
                    source = SpectrumSource(val.strip())
                continue
            if line == "n,E":
                continue
            n_str, _, e_str = line.partition(",")
            levels.append(float(e_str))
    if planck is None or source is None:
        raise ValueError(f"{path}: missing '# h=' or '# source=' metadata")
    return Spectrum(np.asarray(levels), planck, source)
