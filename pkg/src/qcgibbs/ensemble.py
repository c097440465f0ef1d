"""Canonical-ensemble statistics, quantum and classical.

Quantum quantities are Boltzmann sums over a Spectrum with explicit truncation
control: every truncated sum is gated on tail/sum below a relative threshold
(default 1e-10), and sums are evaluated relative to the ground level so that
beta sweeps spanning several decades never underflow prematurely. Classical
quantities reduce to closed forms for box wells, to radial integrals evaluated
by adaptive quadrature (cross-checked against the Gamma-function closed form)
for power-law potentials, and to exact piecewise integrals of the interpolant
for tabulated profiles.

Entropies follow the identities
    S_q = beta E_q + log Z_q
    S_c = beta E_c + log Z_c - N log(2 pi h),
the second carrying the regularizing offset that makes the two comparable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.special import gammaln, xlogy

from .errors import AccuracyError, IntegrabilityError, TruncationError
from .potential import Potential, PotentialKind, volume
from .spectrum import Spectrum, log_tail_bound
from .util import fmt17, log_upper_gamma, logsumexp

TAIL_RTOL = 1e-10

_U_SPLIT = 50.0  # radial integrals switch to the analytic tail where beta*V = 50


def _shifted(spectrum: Spectrum, beta: float) -> tuple[float, np.ndarray, np.ndarray]:
    levels = spectrum.levels
    d = levels - levels[0]
    return levels[0], d, np.exp(-beta * d)


def _log_tail_or_none(spectrum: Spectrum, beta: float, power: int = 0) -> float:
    """log tail bound; -inf for small level sets, which are taken as complete
    finite systems (no truncation)."""
    if spectrum.count < 8:
        return -math.inf
    return log_tail_bound(spectrum, beta, power)


def log_z_quantum(
    spectrum: Spectrum, beta: float, tail_rtol: float = TAIL_RTOL
) -> tuple[float, float]:
    """(log Z_q, log tail bound) for Z_q = sum_n exp(-beta E_n(h)).

    Raises TruncationError when the tail bound exceeds tail_rtol times the
    partial sum.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    e0, _, w = _shifted(spectrum, beta)
    log_z = -beta * e0 + math.log(float(w.sum()))
    log_tail = _log_tail_or_none(spectrum, beta)
    if log_tail - log_z >= math.log(tail_rtol):
        raise TruncationError(
            f"Boltzmann tail/sum ~ {math.exp(min(log_tail - log_z, 50.0)):.2e} "
            f"at beta={beta:g} exceeds {tail_rtol:g}; increase the level count"
        )
    return log_z, log_tail


def z_quantum(
    spectrum: Spectrum, beta: float, tail_rtol: float = TAIL_RTOL
) -> tuple[float, float]:
    """(Z_q, tail bound). The value can underflow to 0 when beta E_1 > ~745;
    use log_z_quantum for such regimes."""
    log_z, log_tail = log_z_quantum(spectrum, beta, tail_rtol)
    value = math.exp(log_z) if log_z < 700.0 else math.inf
    tail = math.exp(log_tail) if log_tail > -700.0 else 0.0
    return value, tail


def mean_energy_quantum(
    spectrum: Spectrum, beta: float, tail_rtol: float = TAIL_RTOL
) -> float:
    """E_q = sum E_n exp(-beta E_n) / Z_q, gated on both the plain and the
    energy-weighted truncation tails."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    e0, d, w = _shifted(spectrum, beta)
    sw = float(w.sum())
    log_num = -beta * e0 + math.log(float((spectrum.levels * w).sum()))
    log_wtail = _log_tail_or_none(spectrum, beta, power=1)
    if log_wtail - log_num >= math.log(tail_rtol):
        raise TruncationError(
            f"energy-weighted tail at beta={beta:g} exceeds {tail_rtol:g} "
            "of the partial sum; increase the level count"
        )
    log_z_quantum(spectrum, beta, tail_rtol)  # plain-tail gate
    return e0 + float((d * w).sum()) / sw


def entropy_quantum(
    spectrum: Spectrum, beta: float, tail_rtol: float = TAIL_RTOL
) -> tuple[float, np.ndarray]:
    """(S_q, P_n) with P_n = exp(-beta E_n)/Z_q and S_q = -sum P_n log P_n.

    The direct sum is cross-checked against beta E_q + log Z_q to 1e-10.
    """
    e0, d, w = _shifted(spectrum, beta)
    sw = float(w.sum())
    p = w / sw
    s_direct = -float(xlogy(p, p).sum())
    e_shift = float((d * w).sum()) / sw
    s_identity = beta * e_shift + math.log(sw)
    if abs(s_direct - s_identity) > 1e-10 * max(1.0, abs(s_identity)):
        raise AccuracyError(
            f"entropy identity violated: {s_direct!r} vs {s_identity!r}"
        )
    log_z_quantum(spectrum, beta, tail_rtol)
    total = float(p.sum())
    if abs(total - 1.0) > 1e-12:
        raise AccuracyError(f"probabilities sum to {total!r}")
    return s_direct, p


def log_entropy_quantum(spectrum: Spectrum, beta: float) -> float:
    """log S_q, stable deep in the ground-state-dominated regime.

    S_q = beta * A + L with A = sum (E_n - E_1) w_n / sum w_n and
    L = log sum w_n; both shrink like exp(-beta (E_2 - E_1)), so each is
    assembled in log space. Returns -inf for a single level.
    """
    if spectrum.count < 2:
        return -math.inf
    e0, d, _ = _shifted(spectrum, beta)
    dd = d[1:]
    pos = dd > 0.0
    if not np.all(pos):
        # degenerate ground level: S_q is O(1), the linear path is exact enough
        s, _ = entropy_quantum(spectrum, beta, tail_rtol=math.inf)
        return math.log(s)
    log_r = logsumexp(-beta * dd)  # r = sum_{n>=2} w_n
    if log_r > -30.0:
        s, _ = entropy_quantum(spectrum, beta, tail_rtol=math.inf)
        return math.log(s)
    # log(sum w) ~ r and beta*A ~ beta * sum d w; both tiny
    log_a_num = logsumexp(np.log(dd) - beta * dd)
    return float(np.logaddexp(math.log(beta) + log_a_num, log_r))


# ---------------------------------------------------------------------------
# classical side


def _kinetic_prefactor(potential: Potential, beta: float) -> float:
    return (2.0 * math.pi * potential.mass / beta) ** (potential.dimension / 2.0)


def _sphere_surface(n: int) -> float:
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _radial_config_integral(nu: float, n_dim: int, beta: float) -> tuple[float, float]:
    """(value, error) of int_0^inf exp(-beta r^nu) r^(N-1) dr via the
    substitution u = beta r^nu, quadrature on [0, 50] with the algebraic
    endpoint weight u^(N/nu - 1), and an analytic bound for the remainder.
    Cross-checked against the closed form Gamma(N/nu) / (nu beta^(N/nu))."""
    a = n_dim / nu
    scale = math.exp(-a * math.log(beta) - math.log(nu))
    val, err = integrate.quad(
        lambda u: math.exp(-u), 0.0, _U_SPLIT,
        weight="alg", wvar=(a - 1.0, 0.0), epsabs=0.0, epsrel=1e-12, limit=200,
    )
    tail = math.exp(log_upper_gamma(a, _U_SPLIT))
    value = scale * (val + tail)
    closed = math.exp(gammaln(a) - a * math.log(beta) - math.log(nu))
    if not math.isfinite(value) or value <= 0.0:
        raise IntegrabilityError("radial configuration integral did not converge")
    if abs(value - closed) > 1e-8 * closed:
        raise AccuracyError(
            f"radial quadrature {value!r} disagrees with the Gamma closed form {closed!r}"
        )
    return value, scale * err + abs(value - closed) + 1e-14 * value


def _tabulated_config_integral(potential: Potential, beta: float) -> tuple[float, float]:
    """Exact integral of exp(-beta V) for the piecewise-linear interpolant."""
    xs = potential.grid_x
    vs = potential.grid_v
    dx = np.diff(xs)
    w0 = np.exp(-beta * vs[:-1])
    w1 = np.exp(-beta * vs[1:])
    z = -beta * np.diff(vs)  # exp exponent across each segment
    small = np.abs(z) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        seg = np.where(small, dx * w0 * (1.0 + z / 2.0 + z * z / 6.0), dx * (w1 - w0) / z)
    value = float(seg.sum())
    return value, 1e-14 * value * len(dx)


def z_classical(potential: Potential, beta: float) -> tuple[float, float]:
    """(Z_c, error estimate) for the phase-space integral of exp(-beta H).

    The momentum Gaussian integrates to (2 pi m / beta)^(N/2); what remains is
    the configuration integral of exp(-beta V).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    kin = _kinetic_prefactor(potential, beta)
    if potential.kind is PotentialKind.BOX:
        value = kin * volume(potential)
        return value, 1e-15 * value
    if potential.kind is PotentialKind.HOMOGENEOUS:
        radial, radial_err = _radial_config_integral(
            potential.exponent, potential.dimension, beta
        )
        surf = _sphere_surface(potential.dimension)
        return kin * surf * radial, kin * surf * radial_err
    config, config_err = _tabulated_config_integral(potential, beta)
    if not math.isfinite(config) or config <= 0.0:
        raise IntegrabilityError("configuration integral did not converge")
    return kin * config, kin * config_err


def _radial_mean_v(nu: float, n_dim: int, beta: float) -> float:
    """<V> under exp(-beta r^nu) r^(N-1) dr, by quadrature in u = beta r^nu."""
    a = n_dim / nu
    num, _ = integrate.quad(
        lambda u: math.exp(-u), 0.0, _U_SPLIT,
        weight="alg", wvar=(a, 0.0), epsabs=0.0, epsrel=1e-12, limit=200,
    )
    num += math.exp(log_upper_gamma(a + 1.0, _U_SPLIT))
    den, _ = integrate.quad(
        lambda u: math.exp(-u), 0.0, _U_SPLIT,
        weight="alg", wvar=(a - 1.0, 0.0), epsabs=0.0, epsrel=1e-12, limit=200,
    )
    den += math.exp(log_upper_gamma(a, _U_SPLIT))
    return num / den / beta


def _tabulated_mean_v(potential: Potential, beta: float) -> float:
    """<V> for the piecewise-linear interpolant, per-segment closed forms."""
    xs = potential.grid_x
    vs = potential.grid_v
    dx = np.diff(xs)
    v0 = vs[:-1]
    v1 = vs[1:]
    w0 = np.exp(-beta * v0)
    w1 = np.exp(-beta * v1)
    dv = v1 - v0
    s = dv / dx
    small = np.abs(beta * dv) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        # int (V) e^{-beta V} dx over a segment = (1/s) int_{v0}^{v1} y e^{-beta y} dy
        anti0 = (v0 / beta + 1.0 / beta**2) * w0
        anti1 = (v1 / beta + 1.0 / beta**2) * w1
        num_seg = np.where(
            small,
            dx * 0.5 * (v0 + v1) * np.exp(-beta * 0.5 * (v0 + v1)),
            (anti0 - anti1) / s,
        )
        den_seg = np.where(
            small,
            dx * w0 * (1.0 - beta * dv / 2.0),
            dx * (w1 - w0) / (-beta * dv),
        )
    return float(num_seg.sum()) / float(den_seg.sum())


def mean_energy_classical(potential: Potential, beta: float) -> float:
    """E_c, the canonical mean of H = p^2/2m + V.

    Box: N/(2 beta) exactly. Power law r^nu: N (2 + nu) / (2 nu beta), i.e.
    N/(alpha beta) with alpha = 2 nu/(2 + nu), cross-checked against direct
    quadrature of <V> to 1e-8 relative. Tabulated: kinetic part plus <V> from
    the exact per-segment integrals.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    n_dim = potential.dimension
    kinetic = n_dim / (2.0 * beta)
    if potential.kind is PotentialKind.BOX:
        return kinetic
    if potential.kind is PotentialKind.HOMOGENEOUS:
        nu = potential.exponent
        closed = n_dim * (2.0 + nu) / (2.0 * nu * beta)
        quad_value = kinetic + _radial_mean_v(nu, n_dim, beta)
        if abs(quad_value - closed) > 1e-8 * abs(closed):
            raise AccuracyError(
                f"classical energy quadrature {quad_value!r} disagrees with "
                f"the closed form {closed!r}"
            )
        return closed
    return kinetic + _tabulated_mean_v(potential, beta)


def entropy_classical(potential: Potential, beta: float, planck: float) -> float:
    """S_c = beta E_c + log Z_c - N log(2 pi h)."""
    if planck <= 0.0:
        raise ValueError("planck must be positive")
    zc, _ = z_classical(potential, beta)
    ec = mean_energy_classical(potential, beta)
    return beta * ec + math.log(zc) - potential.dimension * math.log(2.0 * math.pi * planck)


# ---------------------------------------------------------------------------
# the h-independent entropy profile


def psi(levels, lam: float) -> tuple[float, float]:
    """(Psi, Psi') for Psi(lam) = -lam Phi'/Phi + log Phi, Phi = sum exp(-lam E_n).

    Psi' is the closed pairwise form
        -lam * sum_{n>m} (E_n - E_m)^2 exp(-lam (E_n + E_m)) / Phi^2,
    strictly negative whenever two levels differ; levels may be any reals here.
    """
    e = np.asarray(levels, dtype=float)
    if e.ndim != 1 or e.size < 1:
        raise ValueError("psi needs a non-empty 1-D level array")
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    emin = float(e.min())
    w = np.exp(-lam * (e - emin))
    sw = float(w.sum())
    value = lam * float(((e - emin) * w).sum()) / sw + math.log(sw)
    if e.size <= 4096:
        diff = e[:, None] - e[None, :]
        pair = np.triu(w[:, None] * w[None, :], k=1)
        deriv = -lam * float((diff**2 * pair).sum()) / sw**2
    else:
        # contraction of the pairwise form: sum_{n>m} (E_n-E_m)^2 w_n w_m
        # equals Phi^2 Var_P(E); avoids the K x K intermediate
        mean = float((e * w).sum()) / sw
        var = float((np.square(e - mean) * w).sum()) / sw
        deriv = -lam * var
    return value, deriv


# ---------------------------------------------------------------------------
# error propagation for verification margins


def z_quantum_error(spectrum: Spectrum, beta: float) -> float:
    """Absolute uncertainty of the truncated Z_q: tail bound plus first-order
    propagation of the per-level error estimates."""
    log_tail = _log_tail_or_none(spectrum, beta)
    err = math.exp(log_tail) if log_tail > -700.0 else 0.0
    if spectrum.level_errors is not None:
        e0, _, w = _shifted(spectrum, beta)
        prop = beta * float((spectrum.level_errors * w).sum())
        err += prop * math.exp(max(-beta * e0, -700.0))
    return err


def mean_energy_quantum_error(spectrum: Spectrum, beta: float) -> float:
    """Absolute uncertainty of E_q from truncation and level errors."""
    e0, d, w = _shifted(spectrum, beta)
    sw = float(w.sum())
    eq = e0 + float((d * w).sum()) / sw
    log_z = -beta * e0 + math.log(sw)
    log_tail = _log_tail_or_none(spectrum, beta)
    log_wtail = _log_tail_or_none(spectrum, beta, power=1)
    err = math.exp(min(log_wtail - log_z, 50.0)) + eq * math.exp(
        min(log_tail - log_z, 50.0)
    )
    if spectrum.level_errors is not None:
        sens = w * (1.0 + beta * np.abs(spectrum.levels - eq))
        err += float((spectrum.level_errors * sens).sum()) / sw
    return err


def entropy_quantum_error(spectrum: Spectrum, beta: float) -> float:
    """Absolute uncertainty of S_q = beta E_q + log Z_q."""
    rel_z = z_quantum_error(spectrum, beta)
    e0, _, w = _shifted(spectrum, beta)
    z_lin = math.exp(max(-beta * e0, -700.0)) * float(w.sum())
    return beta * mean_energy_quantum_error(spectrum, beta) + rel_z / z_lin


# ---------------------------------------------------------------------------
# thermodynamic points and tables


@dataclass(frozen=True)
class ThermoPoint:
    """Every thermodynamic quantity of one model at one (beta, h)."""

    beta: float
    planck: float
    dimension: int
    z_quantum: float
    z_quantum_tail: float
    log_z_quantum: float
    z_classical: float
    z_classical_error: float
    e_quantum: float
    e_classical: float
    s_quantum: float
    s_classical: float
    _spectrum: Spectrum = field(repr=False)

    @property
    def zq_scaled(self) -> float:
        """(2 pi h)^N Z_q, the quantity comparable to Z_c."""
        log_scaled = self.dimension * math.log(2.0 * math.pi * self.planck) + self.log_z_quantum
        return math.exp(log_scaled) if log_scaled < 700.0 else math.inf

    @property
    def probabilities(self) -> np.ndarray:
        """Gibbs occupation probabilities P_n, recomputed on demand."""
        _, _, w = _shifted(self._spectrum, self.beta)
        return w / w.sum()


def thermo_point(
    potential: Potential,
    spectrum: Spectrum,
    beta: float,
    tail_rtol: float = TAIL_RTOL,
) -> ThermoPoint:
    """Assemble a ThermoPoint, checking the entropy identities on the way."""
    log_zq, log_tail = log_z_quantum(spectrum, beta, tail_rtol)
    eq = mean_energy_quantum(spectrum, beta, tail_rtol)
    sq, p = entropy_quantum(spectrum, beta, tail_rtol)
    zc, zc_err = z_classical(potential, beta)
    ec = mean_energy_classical(potential, beta)
    h = spectrum.planck
    sc = entropy_classical(potential, beta, h)
    n_dim = potential.dimension
    sc_identity = beta * ec + math.log(zc) - n_dim * math.log(2.0 * math.pi * h)
    if abs(sc - sc_identity) > 1e-10 * max(1.0, abs(sc)):
        raise AccuracyError("classical entropy identity violated")
    return ThermoPoint(
        beta=beta,
        planck=h,
        dimension=n_dim,
        z_quantum=math.exp(log_zq) if log_zq < 700.0 else math.inf,
        z_quantum_tail=math.exp(log_tail) if log_tail > -700.0 else 0.0,
        log_z_quantum=log_zq,
        z_classical=zc,
        z_classical_error=zc_err,
        e_quantum=eq,
        e_classical=ec,
        s_quantum=sq,
        s_classical=sc,
        _spectrum=spectrum,
    )


THERMO_FIELDS = ("beta", "h", "Zq_scaled", "Zc", "Eq", "Ec", "Sq", "Sc")


def _thermo_row(point: ThermoPoint) -> list[float]:
    return [
        point.beta,
        point.planck,
        point.zq_scaled,
        point.z_classical,
        point.e_quantum,
        point.e_classical,
        point.s_quantum,
        point.s_classical,
    ]


def thermo_table_to_csv(points, path: str | Path) -> None:
    """CSV table with header beta,h,Zq_scaled,Zc,Eq,Ec,Sq,Sc at full precision."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(THERMO_FIELDS) + "\n")
        for pt in points:
            fh.write(",".join(fmt17(v) for v in _thermo_row(pt)) + "\n")


def thermo_table_to_json(points) -> str:
    """JSON mirror of the CSV table with identical field names."""
    rows = [dict(zip(THERMO_FIELDS, _thermo_row(pt))) for pt in points]
    return json.dumps({"rows": rows}, sort_keys=True, indent=2)
