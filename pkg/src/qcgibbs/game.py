"""The fixed-temperature compromise between mean energy and entropy.

Over unnormalized weights p_n > 0 on a finite level set, the objective
F = lam * E + S with lam = -beta <= 0 is invariant under rescaling of the
weights. Its stationary rays are exactly p_n proportional to exp(lam E_n),
carrying the Gibbs distribution, and at a stationary point the Hessian has
constant positive off-diagonal entries and negative diagonal entries whose
leading principal minors alternate in sign: sgn(H_k) = (-1)^k for k below the
number of levels (the full determinant vanishes along the scale ray).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AccuracyError, ContractError, ConvergenceError
from .util import fmt17


@dataclass(frozen=True)
class GameState:
    """A finite level set with unnormalized positive weights at fixed lam = -beta."""

    levels: np.ndarray
    lam: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if levels.ndim != 1 or levels.size < 1:
            raise ValueError("levels must be a non-empty 1-D array")
        if weights.shape != levels.shape:
            raise ValueError("weights must match levels in shape")
        if np.any(levels <= 0.0):
            raise ValueError("levels must be positive")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be positive and finite")
        if self.lam > 0.0:
            raise ValueError("lam = -beta must be <= 0 (no negative temperatures)")
        levels.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "weights", weights)

    @property
    def z(self) -> float:
        return float(self.weights.sum())

    @property
    def z_partial(self) -> np.ndarray:
        """Z_k = sum_{j != k} p_j."""
        return self.z - self.weights

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.z


def compromise(state: GameState) -> tuple[float, float, float]:
    """(F, E, S) with E = sum E_n P_n, S = -sum P_n log P_n, F = lam E + S."""
    p = state.probabilities
    energy = float((state.levels * p).sum())
    entropy = -float((p * np.log(p)).sum())
    return state.lam * energy + entropy, energy, entropy


def gradient(state: GameState) -> np.ndarray:
    """dF/dp_k = lam (E_k/Z - sum E_n p_n / Z^2) - log(p_k)/Z + sum p_n log p_n / Z^2."""
    z = state.z
    p = state.probabilities
    ebar = float((state.levels * p).sum())
    logw = np.log(state.weights)
    logbar = float((p * logw).sum())
    return (state.lam * (state.levels - ebar) - logw + logbar) / z


def stationary_point(levels, lam: float) -> np.ndarray:
    """The stationary weights p_n = exp(lam E_n); unique up to a scalar multiple."""
    e = np.asarray(levels, dtype=float)
    if e.ndim != 1 or e.size < 1:
        raise ValueError("levels must be a non-empty 1-D array")
    if lam > 0.0:
        raise ValueError("lam = -beta must be <= 0")
    return np.exp(lam * e)


def stationary_state(levels, lam: float) -> GameState:
    return GameState(np.asarray(levels, dtype=float), lam, stationary_point(levels, lam))


def _stationarity_defect(state: GameState) -> float:
    t = np.log(state.weights) - state.lam * state.levels
    return float(t.max() - t.min())


def hessian(state: GameState, rtol: float = 1e-10) -> np.ndarray:
    """The K x K second-derivative matrix of F at a stationary state.

    Entries hold only on the stationary ray (any positive multiple of
    exp(lam E_n)); elsewhere the call is a contract violation. Diagonal
    -Z_k/(p_k Z^2), off-diagonal 1/Z^2; the weight vector spans the null space.
    """
    defect = _stationarity_defect(state)
    if defect > 2.0 * rtol:
        raise ContractError(
            f"hessian is defined at stationary weights p ~ exp(lam E); "
            f"relative spread {defect:.2e} exceeds {rtol:.1e}"
        )
    z = state.z
    k = state.weights.size
    h = np.full((k, k), 1.0 / z**2)
    np.fill_diagonal(h, -state.z_partial / (state.weights * z**2))
    return h


def structured_det(diagonal, off_value: float) -> float:
    """det of the matrix with diagonal r_1..r_k and constant off-diagonal a.

    Equals -a f'(a) + f(a) with f(x) = prod_i (r_i - x); leave-one-out products
    keep the evaluation exact even when some r_i equals a.
    """
    r = np.asarray(diagonal, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("diagonal must be a non-empty 1-D array")
    a = float(off_value)
    terms = r - a
    k = terms.size
    prefix = np.concatenate(([1.0], np.cumprod(terms)[:-1]))
    suffix = np.concatenate((np.cumprod(terms[::-1])[-2::-1], [1.0]))
    f_val = float(prefix[-1] * terms[-1])
    f_prime = -float((prefix * suffix).sum())
    return -a * f_prime + f_val


def minor_log_magnitude(levels, lam: float, k: int) -> tuple[int, float]:
    """(sign, log|H_k|) of the leading k x k principal minor of the Hessian at
    the stationary point p_n = exp(lam E_n), from the closed product form
        H_k = (-Z)^(-k) (1 - sum_{n<=k} p_n / Z) / prod_{n<=k} p_n.
    """
    e = np.asarray(levels, dtype=float)
    p = np.exp(lam * e)
    z = float(p.sum())
    if k < 1 or k > e.size:
        raise ValueError("k out of range")
    head = float(p[:k].sum())
    rest = 1.0 - head / z
    if rest <= 0.0:
        return 0, -math.inf
    sign = -1 if k % 2 else 1
    log_abs = -k * math.log(z) + math.log(rest) - float(lam * e[:k].sum())
    return sign, log_abs


def principal_minor_signs(levels, lam: float, k_max: int) -> list[int]:
    """Signs of the leading principal minors H_1..H_{k_max} at the stationary point.

    Requires distinct levels, lam < 0, and k_max strictly below the level
    count: the K-th minor vanishes identically along the scale ray. Each sign
    is cross-checked against a dense determinant of the explicit Hessian block
    (for level counts small enough to form it) and against the structured
    determinant identity.
    """
    e = np.asarray(levels, dtype=float)
    if lam >= 0.0:
        raise ValueError("principal_minor_signs requires lam < 0")
    if np.unique(e).size != e.size:
        raise ValueError("levels must be distinct")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if k_max >= e.size:
        raise ContractError(
            "k_max must be strictly below the level count: the full "
            "determinant vanishes along the scale ray"
        )
    signs = []
    state = stationary_state(e, lam)
    dense = hessian(state) if e.size <= 64 else None
    z = state.z
    for k in range(1, k_max + 1):
        sign, log_abs = minor_log_magnitude(e, lam, k)
        expected = -1 if k % 2 else 1
        if sign != expected:
            raise AccuracyError(f"minor {k} has sign {sign}, expected {expected}")
        if dense is not None:
            sgn_d, log_d = np.linalg.slogdet(dense[:k, :k])
            if int(sgn_d) != sign or abs(log_d - log_abs) > 1e-9 * max(1.0, abs(log_d)):
                raise AccuracyError(
                    f"minor {k}: closed form {sign}*exp({log_abs}) disagrees "
                    f"with dense determinant {int(sgn_d)}*exp({log_d})"
                )
            s_det = structured_det(-state.z_partial[:k] / state.weights[:k], 1.0)
            via_structured = s_det / z ** (2 * k)
            if math.isfinite(via_structured) and via_structured != 0.0:
                rel = abs(via_structured - sign * math.exp(log_abs)) / abs(via_structured)
                if rel > 1e-8:
                    raise AccuracyError(f"minor {k}: structured-det cross-check failed")
        signs.append(sign)
    return signs


# ---------------------------------------------------------------------------
# numerical ascent to the stationary point


@dataclass(frozen=True)
class StepPolicy:
    """Line-search policy for the log-weight ascent."""

    initial_step: float = 1.0
    shrink: float = 0.5
    grow: float = 1.3
    max_step: float = 4.0
    grad_tol: float = 1e-11
    max_iterations: int = 100_000


@dataclass(frozen=True)
class AscentResult:
    weights: np.ndarray
    iterations: int
    trace: np.ndarray = field(repr=False)  # rows (iter, F, grad_norm)


def ascend(levels, lam: float, weights, policy: StepPolicy | None = None) -> AscentResult:
    """Gradient ascent on F in log-weight coordinates with the scale gauge fixed.

    Weights are renormalized to sum to Z* = sum exp(lam E_n) after every step,
    which removes the flat scale direction. Steps follow the diagonally
    preconditioned direction Z * dF/dp (the multiplicative-update natural
    gradient), accepted only when F does not decrease, so the recorded F
    column is non-decreasing. Raises ConvergenceError at the iteration cap.
    """
    if lam >= 0.0:
        raise ValueError("ascend requires lam < 0")
    policy = policy or StepPolicy()
    e = np.asarray(levels, dtype=float)
    p0 = np.asarray(weights, dtype=float)
    z_star = float(np.exp(lam * e).sum())
    x = np.log(p0)
    x += math.log(z_star) - math.log(float(np.exp(x).sum()))
    eta = policy.initial_step
    trace_rows: list[tuple[float, float, float]] = []

    state = GameState(e, lam, np.exp(x))
    f_cur, _, _ = compromise(state)
    for it in range(policy.max_iterations + 1):
        g = gradient(state)
        gnorm = float(np.max(np.abs(state.z * g)))
        trace_rows.append((float(it), f_cur, gnorm))
        if gnorm <= policy.grad_tol:
            return AscentResult(state.weights, it, np.asarray(trace_rows))
        if it == policy.max_iterations:
            break
        direction = state.z * g
        accepted = False
        while eta >= 1e-18:
            x_try = x + eta * direction
            x_try = x_try + math.log(z_star) - math.log(float(np.exp(x_try).sum()))
            state_try = GameState(e, lam, np.exp(x_try))
            f_try, _, _ = compromise(state_try)
            if f_try >= f_cur:
                x, state, f_cur = x_try, state_try, f_try
                eta = min(eta * policy.grow, policy.max_step)
                accepted = True
                break
            eta *= policy.shrink
        if not accepted:
            if gnorm <= 1e-8:
                # machine-precision plateau around the maximum
                return AscentResult(state.weights, it, np.asarray(trace_rows))
            raise ConvergenceError(
                f"line search stalled at iteration {it}, gradient norm {gnorm:.3e}"
            )
    raise ConvergenceError(
        f"ascent hit the cap of {policy.max_iterations} iterations; "
        f"final gradient norm {gnorm:.3e}"
    )


def trace_to_csv(trace: np.ndarray, path: str | Path) -> None:
    """Write an ascent trace as ``iter,F,grad_norm`` rows."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("iter,F,grad_norm\n")
        for row in np.atleast_2d(trace):
            fh.write(f"{int(row[0])},{fmt17(row[1])},{fmt17(row[2])}\n")
