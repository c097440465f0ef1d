import json
import math

import numpy as np
import pytest

from qcgibbs import (
    ClaimId,
    Status,
    box_family,
    check_c11,
    check_c12,
    check_c13,
    check_c41_and_props,
    check_t31,
    check_t41,
    check_wehrl,
    homogeneous_family,
    reports_to_json,
    run_claims,
)
from qcgibbs.ensemble import entropy_classical, entropy_quantum, z_classical, z_quantum
from qcgibbs.verify import THEOREM_CLAIMS, report_from_dict

SMALL_BETAS = np.array([0.1, 1.0, 10.0])
SMALL_HS = np.array([0.5, 1.0, 2.0])


# ---------------------------------------------------------------------------
# C1_1


def test_c11_box_small_grid(box1):
    rep = check_c11(box1, SMALL_BETAS, SMALL_HS)
    assert rep.status is Status.HOLDS
    assert rep.worst_margin > 0
    assert rep.claim_id is ClaimId.C1_1


def test_c11_oscillator_small_grid(oscillator):
    rep = check_c11(oscillator, SMALL_BETAS, SMALL_HS)
    assert rep.status is Status.HOLDS


def test_c11_cold_limit_margin_is_classical_sum(box1):
    rep = check_c11(box1, np.array([50.0]), np.array([1.0]))
    zc, _ = z_classical(box1.potential, 50.0)
    assert rep.worst_margin == pytest.approx(zc, rel=1e-6)


def test_c11_downgrades_on_fat_error_bars(box1):
    # a spectrum whose injected level errors swamp the margin must not pass
    from qcgibbs.models import ModelFamily
    from qcgibbs.spectrum import Spectrum, SpectrumSource, solve_box

    class Noisy(ModelFamily):
        def spectrum(self, planck, lambda_min):
            spec = solve_box(1, self.potential.lengths, 1.0, 1.0, 400)
            errs = np.full(spec.count, 100.0)
            noisy = Spectrum(spec.levels, 1.0, SpectrumSource.ANALYTIC_BOX,
                             level_errors=errs)
            from qcgibbs.spectrum import rescale

            return rescale(noisy, planck, 2.0)

    fam = Noisy(box1.potential, "noisy_box")
    rep = check_c11(fam, np.array([1.0]), np.array([1.0]))
    assert rep.status is Status.INCONCLUSIVE


# ---------------------------------------------------------------------------
# C1_2


def test_c12_box_and_oscillator(box1, oscillator):
    for fam in (box1, oscillator):
        rep = check_c12(fam, SMALL_BETAS, SMALL_HS)
        assert rep.status is Status.HOLDS
        assert rep.worst_margin > 0


def test_c12_cold_limit_margin_is_ground_level(box1):
    beta = 50.0
    rep = check_c12(box1, np.array([beta]), np.array([1.0]))
    e1 = math.pi**2 / 2
    assert rep.worst_margin == pytest.approx(e1 - 1 / (2 * beta), rel=1e-8)


# ---------------------------------------------------------------------------
# C1_3


def test_c13_box_monotone_but_outside_window(box1):
    # the box boundary correction decays like sqrt(beta): monotone approach,
    # still ~8 percent away from 1 at beta = 1/256
    reps = check_c13(box1)
    by_id = {r.claim_id: r for r in reps}
    assert set(by_id) == {ClaimId.C1_3_Z, ClaimId.C1_3_E}
    for rep in reps:
        assert rep.status is Status.INCONCLUSIVE
        assert rep.worst_margin > 0  # gaps strictly shrinking
        assert not rep.notes["window_reached"]
    assert by_id[ClaimId.C1_3_Z].notes["final_gap"] == pytest.approx(0.0783, abs=2e-4)
    assert by_id[ClaimId.C1_3_E].notes["final_gap"] == pytest.approx(0.0850, abs=2e-4)


def test_c13_oscillator_reaches_window(oscillator):
    reps = check_c13(oscillator)
    for rep in reps:
        assert rep.status is Status.HOLDS
        assert rep.notes["final_gap"] < 0.02


def test_c13_self_comparison_is_identity(box1):
    # replacing the quantum side by Z_c/(2 pi h)^N forces the ratio to 1
    betas = [1.0, 0.5, 0.25]
    for beta in betas:
        zc, _ = z_classical(box1.potential, beta)
        assert (2 * math.pi) * (zc / (2 * math.pi)) / zc == pytest.approx(1.0, rel=1e-15)


# ---------------------------------------------------------------------------
# T3_1


def test_t31_box(box1):
    rep = check_t31(box1, h=1.0, beta=1.0)
    assert rep.status is Status.HOLDS
    assert rep.notes["lhs"] > 0
    assert abs(rep.notes["residual"]) < 1e-3 * max(1.0, abs(rep.notes["rhs"]))


def test_t31_empty_interval(box1):
    rep = check_t31(box1, h=1.0, beta=1.0, tau=1.0)
    assert rep.notes["lhs"] == 0.0
    assert rep.notes["rhs"] == 0.0


def test_t31_oscillator(oscillator):
    rep = check_t31(oscillator, h=1.0, beta=2.0, tau=2e-3)
    assert rep.status is Status.HOLDS


def test_t31_holds_on_every_family(box1, wedge, oscillator, quartic):
    # theorem-class: must hold on every shipped family (tau kept above the
    # depth the level cap supports for the slowly-growing wedge spectrum)
    for fam in (box1, wedge, oscillator, quartic):
        rep = check_t31(fam, h=1.0, beta=1.0, tau=5e-3)
        assert rep.status is Status.HOLDS, fam.label


def test_resource_cap_reports_reachable_depth():
    from qcgibbs import ResourceError, homogeneous_family

    fam = homogeneous_family(1.0)
    fam.level_cap = 10_000
    with pytest.raises(ResourceError, match="beta \\* phi"):
        fam.base_spectrum(1e-4)


# ---------------------------------------------------------------------------
# T4_1


def test_t41_box(box1):
    reps = check_t41(box1, SMALL_BETAS, SMALL_HS)
    assert [r.claim_id for r in reps] == [ClaimId.T4_1_beta, ClaimId.T4_1_h]
    for rep in reps:
        assert rep.status is Status.HOLDS
        assert rep.worst_margin > 0


def test_t41_entropy_via_psi_route_agrees(oscillator):
    # S_q(beta, h) equals the h-independent profile at lam = beta * phi(h)
    from qcgibbs.ensemble import psi

    lam_min = 0.25
    spec = oscillator.spectrum(2.0, lam_min)
    s_direct, _ = entropy_quantum(spec, 0.5)
    base = oscillator.base_spectrum(lam_min)
    value, _ = psi(base.levels, 0.5 * oscillator.phi(2.0))
    assert s_direct == pytest.approx(value, abs=1e-10)


def test_t41_single_level_is_inconclusive():
    fam = homogeneous_family(2.0)
    fam._base = __import__("qcgibbs").oscillator_spectrum(1)
    fam._depth = math.inf
    reps = check_t41(fam, np.array([0.5, 1.0]), np.array([1.0, 2.0]))
    for rep in reps:
        assert rep.status is Status.INCONCLUSIVE
        assert rep.notes["vacuous"]


# ---------------------------------------------------------------------------
# C4_1, P4_1, P4_3


def test_c41_and_props_oscillator(oscillator):
    c41, p41, p43 = check_c41_and_props(oscillator, beta=1.0)
    assert c41.claim_id is ClaimId.C4_1 and c41.status is Status.HOLDS
    assert p41.claim_id is ClaimId.P4_1 and p41.status is Status.HOLDS
    assert p41.notes["max_residual"] < 1e-5
    assert p43.claim_id is ClaimId.P4_3 and p43.status is Status.HOLDS
    assert p43.notes["signs_opposite_everywhere"]


def test_c41_rejects_box(box1):
    with pytest.raises(ValueError):
        check_c41_and_props(box1)


def test_p41_derivative_vanishes_as_beta_shrinks(oscillator):
    # N - alpha beta E_q -> 0 from below in the high-temperature limit
    lam_min = 0.01
    spec = oscillator.spectrum(1.0, lam_min)
    from qcgibbs.ensemble import mean_energy_quantum

    beta = 0.05
    factor = 1.0 - beta * mean_energy_quantum(spec, beta)
    assert -1e-2 < factor < 0.0


# ---------------------------------------------------------------------------
# the h -> 0 limit


def test_wehrl_box(box1):
    rep = check_wehrl(box1)
    assert rep.status is Status.HOLDS
    for key in ("energy_gaps", "partition_gaps", "entropy_gaps"):
        gaps = rep.notes[key]
        assert all(a > b for a, b in zip(gaps[-4:], gaps[-3:]))
    assert rep.notes["entropy_gaps"][-1] < 0.02


def test_wehrl_oscillator(oscillator):
    rep = check_wehrl(oscillator)
    assert rep.status is Status.HOLDS


def test_wehrl_identity_composition(box1):
    # S_q - S_c recomputed through the partition/energy gaps agrees to 1e-10
    beta, h = 1.0, 0.125
    spec = box1.spectrum(h, beta * h**2)
    sq, _ = entropy_quantum(spec, beta)
    sc = entropy_classical(box1.potential, beta, h)
    zq, _ = z_quantum(spec, beta)
    zc, _ = z_classical(box1.potential, beta)
    from qcgibbs.ensemble import mean_energy_classical, mean_energy_quantum

    eq = mean_energy_quantum(spec, beta)
    ec = mean_energy_classical(box1.potential, beta)
    composed = beta * (eq - ec) + math.log(2 * math.pi * h * zq / zc)
    assert (sq - sc) == pytest.approx(composed, abs=1e-10)


# ---------------------------------------------------------------------------
# reports and the driver


def test_reports_serialize_and_round_trip(box1):
    reps = run_claims(box1, ["c11", "t31"],
                      c11={"betas": SMALL_BETAS, "hs": SMALL_HS})
    text = reports_to_json(reps)
    data = json.loads(text)
    assert len(data) == 2
    back = [report_from_dict(d) for d in data]
    assert [r.claim_id for r in back] == [r.claim_id for r in reps]
    assert [r.status for r in back] == [r.status for r in reps]
    assert back[0].worst_margin == reps[0].worst_margin


def test_run_claims_rejects_unknown_key(box1):
    with pytest.raises(ValueError):
        run_claims(box1, ["nope"])


def test_reports_deterministic(box1):
    a = check_c11(box1, SMALL_BETAS, SMALL_HS)
    b = check_c11(box1, SMALL_BETAS, SMALL_HS)
    assert a.to_dict() == b.to_dict()


def test_theorem_claim_set():
    assert ClaimId.C1_1 in THEOREM_CLAIMS
    assert ClaimId.T3_1 in THEOREM_CLAIMS
    assert ClaimId.C1_2 not in THEOREM_CLAIMS
    assert ClaimId.C4_1 not in THEOREM_CLAIMS
