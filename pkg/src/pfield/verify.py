"""Acceptance checks, shared by ``pfield verify`` and the test suite.

Each check returns a :class:`CheckResult`; a check passes only if its
numerical conditions hold *and* it finishes inside its time budget.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import epr, momentum, position, tunneling
from .core import PhysicalParams
from .errors import AmplitudeTooLarge, PFError
from .numerics import Quadrature



@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    elapsed: float
    budget: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:>2} {self.name} ({self.elapsed:.2f}s / {self.budget:g}s)"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "elapsed": self.elapsed, "budget": self.budget, "details": self.details}


def _run(number: int, name: str, budget: float, body: Callable[[], dict]) -> CheckResult:
    start = time.perf_counter()
    try:
        details = body()
        ok = bool(details.pop("ok"))
    except PFError as exc:
        details, ok = {"error": f"{type(exc).__name__}: {exc}"}, False
    elapsed = time.perf_counter() - start
    return CheckResult(number, name, ok and elapsed < budget, elapsed, budget, details)


def _random_barrier_states(rng: np.random.Generator, n: int):
    for _ in range(n):
        E = rng.uniform(0.1, 10.0)
        V0 = E + rng.uniform(0.1, 10.0)
        spec = tunneling.BarrierSpec(E, V0)
        kp1 = E * rng.uniform(0.01, 1.0)
        kp2 = (V0 - E) * 10.0 ** rng.uniform(-2.0, 2.0)
        yield (spec, tunneling.region1_state(spec, kp1, rng.uniform(-np.pi, np.pi)),
               tunneling.region2_state(spec, kp2, rng.uniform(-1.0, 1.0)))


def check_tunneling_identity(seed: int = 0) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        worst_total = worst_kii = 0.0
        for spec, s1, s2 in _random_barrier_states(rng, 1000):
            worst_total = max(worst_total, tunneling.total_energy_consistency(spec, s1, s2))
            target = spec.total_energy - spec.barrier_height
            kii = tunneling.effective_kinetic(spec, s2)
            worst_kii = max(worst_kii, abs(kii - target) / abs(target))
        return {"ok": worst_total < 1e-12 and worst_kii < 1e-12,
                "max_total_mismatch": worst_total, "max_effective_kinetic_error": worst_kii}
    return _run(1, "tunneling energy identity", 1.0, body)


def check_inequalities(seed: int = 1) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        violations = 0
        for _, s1, s2 in _random_barrier_states(rng, 1000):
            violations += (not s1.satisfies_inequality()) + (not s2.satisfies_inequality())
        spec = tunneling.BarrierSpec(1.0, 2.0)
        _, kappa = tunneling.wavenumbers(spec)
        gap = spec.barrier_height - spec.total_energy
        limit_err = abs(tunneling.region2_amplitude(spec, 1e12 * gap) - 1.0 / kappa)
        grid = gap * np.geomspace(1e-2, 1e12, 57)
        r = np.array([tunneling.region2_amplitude(spec, k) for k in grid])
        approach = bool(np.all(np.diff(r) < 0) and np.all(r > 1.0 / kappa))
        return {"ok": violations == 0 and limit_err < 1e-6 and approach,
                "violations": violations, "limit_error": limit_err,
                "monotone_from_above": approach}
    return _run(2, "tunneling inequalities and limit", 1.0, body)


def check_ledger_position_independence(seed: int = 2) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        worst_total = worst_field = 0.0
        for _ in range(10):
            E = rng.uniform(0.2, 2.0)
            V0 = E + rng.uniform(0.2, 2.0)
            spec = tunneling.BarrierSpec(E, V0, barrier_width=1.0)
            states = [
                (tunneling.region1_state(spec, E * rng.uniform(0.05, 1.0), rng.uniform(-3, 3)),
                 np.linspace(-10.0, -1e-3, 100)),
                (tunneling.region2_state(spec, (V0 - E) * rng.uniform(0.1, 10.0), rng.uniform(-1, 1)),
                 np.linspace(0.0, spec.barrier_width, 100)),
            ]
            for state, xs in states:
                ledgers = [tunneling.energy_ledger(spec, state, float(x)) for x in xs]
                totals = np.array([lg.particle_kinetic + lg.field_kinetic + lg.field_potential
                                   + lg.external_potential for lg in ledgers])
                fields = np.array([lg.field_energy for lg in ledgers])
                scale_e = max(1.0, abs(spec.total_energy))
                scale_f = max(1.0, abs(state.field_energy()))
                worst_total = max(worst_total, np.ptp(totals) / scale_e,
                                  np.max(np.abs(totals - E)) / scale_e)
                worst_field = max(worst_field, np.ptp(fields) / scale_f,
                                  np.max(np.abs(fields - state.field_energy())) / scale_f)
        return {"ok": worst_total < 1e-12 and worst_field < 1e-12,
                "max_total_variation": float(worst_total),
                "max_field_energy_variation": float(worst_field)}
    return _run(3, "ledger position independence", 1.0, body)


def check_de_broglie(seed: int = 3) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        worst_rel = worst_lam = 0.0
        for _ in range(1000):
            pp = rng.uniform(0.05, 20.0)
            prep = momentum.MomentumPrep(pp, rng.uniform(0.0, 0.999) / pp,
                                         params=PhysicalParams(rng.uniform(0.1, 10.0), 1.0))
            p = momentum.de_broglie_momentum(prep)
            v1 = p / prep.params.mass_m
            worst_rel = max(worst_rel, abs(momentum.field_velocity_relation(prep) - v1) / v1)
            worst_lam = max(worst_lam, abs(momentum.wavelength(prep) * p / prep.params.h - 1.0))
        raised = 0
        for amp in (1.0, 1.5):
            try:
                momentum.de_broglie_momentum(momentum.MomentumPrep(1.0, amp))
            except AmplitudeTooLarge:
                raised += 1
        return {"ok": worst_rel < 1e-10 and worst_lam < 1e-12 and raised == 2,
                "max_velocity_relation_error": worst_rel,
                "max_wavelength_error": worst_lam, "violations_raised": raised}
    return _run(4, "de Broglie consistency", 1.0, body)


def gaussian_packet(center: float, width: float, p0: float, hbar: float = 1.0):
    """Normalized ``|X|² `` Gaussian (std ``width``) carrying momentum ``p0``."""
    norm = (2.0 * math.pi * width ** 2) ** -0.25

    def X(x):
        x = np.asarray(x, dtype=float)
        return norm * np.exp(-((x - center) ** 2) / (4.0 * width ** 2) + 1j * p0 * x / hbar)
    return X


def check_eigenfield_roundtrip() -> CheckResult:
    def body():
        center, width, p0, amp = 0.3, 1.0, 1.25, 0.5
        X = gaussian_packet(center, width, p0)
        xs = np.linspace(center - 14.0, center + 14.0, 2801)
        snap = momentum.FieldSnapshot.from_function(X, xs)
        ps = np.linspace(p0 - 6.0, p0 + 6.0, 1201)
        phi = momentum.expand_field(snap, amp, ps)
        back = momentum.synthesize_field(phi, ps, amp, xs)
        err = math.sqrt(np.trapezoid(np.abs(back - snap.values) ** 2, xs)
                        / np.trapezoid(np.abs(snap.values) ** 2, xs))
        mean_p = momentum.mean_momentum(phi, ps)
        return {"ok": err <= 1e-5 and abs(mean_p - p0) <= 1e-6,
                "l2_error": err, "mean_momentum": mean_p, "expected": p0}
    return _run(5, "eigenfield expansion roundtrip", 30.0, body)


def check_slit_series(seed: int = 5) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        worst_edge = worst_bound = 0.0
        for _ in range(200):
            n_terms = int(rng.integers(1, 9))
            spec = position.SlitSpec(
                slit_left=rng.uniform(-1.0, 1.0), slit_width=rng.uniform(0.01, 1.0),
                mode_index=int(rng.integers(1, 11)),
                series_coefficients=tuple(rng.uniform(0.0, 2.0, n_terms)),
                truncation_order=int(rng.integers(1, 9)))
            a, da = spec.slit_left, spec.slit_width
            scale = max(float(np.abs(spec.coefficients).sum()), 1e-300)
            edges = position.f_series(spec, np.array([a, a + da]))
            worst_edge = max(worst_edge, float(np.max(np.abs(edges))) / scale)
            xs = a + da * rng.uniform(0.0, 1.0, 50)
            shift = np.abs(position.pf_position(spec, xs) - (xs - a))
            worst_bound = max(worst_bound, float(np.max(shift)) / spec.shift_bound())
        spec = position.SlitSpec(0.0, 0.1, 1, (1.0,))
        worked = abs(position.pf_position(spec, 0.025) - (0.025 + 0.1 / math.pi))
        return {"ok": worst_edge < 1e-10 and worst_bound <= 1.0 + 1e-12 and worked < 1e-12,
                "max_edge_value": worst_edge, "max_shift_over_bound": worst_bound,
                "worked_value_error": worked}
    return _run(6, "slit series", 1.0, body)


def check_propagator() -> CheckResult:
    def body():
        scn = epr.EprScenario(offset=1.0, relative_momentum=2.0)
        xs = np.linspace(-3.0, 3.0, 61)
        q = Quadrature(1e-12, 1e-11)
        devs = {s: epr.propagation_deviation(scn, xs, 1.0, s, q) for s in (1e-2, 1e-3, 1e-4)}
        mod = [devs[s][0] for s in (1e-2, 1e-3, 1e-4)]
        pha = [devs[s][1] for s in (1e-2, 1e-3, 1e-4)]
        monotone = mod[0] > mod[1] > mod[2] and pha[0] > pha[1] > pha[2]
        return {"ok": devs[1e-3][0] < 1e-4 and devs[1e-3][1] < 1e-3 and monotone,
                "modulus_deviation": mod, "phase_deviation": pha}
    return _run(7, "propagator oracle", 60.0, body)


def check_amplitude_law() -> CheckResult:
    def body():
        t = np.geomspace(1e-3, 1e3, 50)
        good = epr.amplitude_law_check(1.0, 2.0, t)
        bad = epr.amplitude_law_check(1.0, 2.0, t, epr.AmplitudeLaw.linear_law(1.0))
        bad_min = min(bad.derivative_residual, bad.speed_residual, bad.balance_residual)
        return {"ok": good.passed(1e-10) and bad_min > 0.1,
                "sqrt_law": good.as_dict(), "linear_law": bad.as_dict()}
    return _run(8, "amplitude law", 1.0, body)


def check_epr_correlations(seed: int = 9) -> CheckResult:
    def body():
        ens = epr.sample_ensemble(10_000, seed)
        t = np.linspace(0.0, 10.0, 11)
        momentum_fail = position_fail = 0
        worst = 0.0
        for i in range(len(ens)):
            scn = ens.scenario(i)
            p1, p2 = epr.pair_momenta(scn)
            momentum_fail += (p1 + p2 != 0.0) or (p2 != epr.predict_partner_momentum(p1))
            position_fail += (scn.x2_0 - scn.x1_0 != scn.offset) or \
                (scn.x2_0 != epr.predict_partner_position(scn.x1_0, scn.offset))
            tracks = epr.pair_tracks(scn, t)
            rel = epr.relative_track(scn, t)
            worst = max(worst, float(np.max(np.abs(tracks.relative - rel) / np.maximum(1.0, np.abs(rel)))))
        return {"ok": momentum_fail == 0 and position_fail == 0 and worst <= 1e-12,
                "momentum_failures": momentum_fail, "position_failures": position_fail,
                "max_track_mismatch": worst}
    return _run(9, "EPR correlations", 1.0, body)


def _tensor_gauss_3d(delta, p_max, taper, hbar=1.0, nodes=64):
    """Full 3-D momentum integral on a composite Gauss-Legendre tensor grid."""
    g, w = np.polynomial.legendre.leggauss(nodes)
    cut = (1.0 - taper) * p_max
    panels = [(-p_max, -cut), (-cut, cut), (cut, p_max)]
    p = np.concatenate([0.5 * (b - a) * g + 0.5 * (a + b) for a, b in panels])
    wt = np.concatenate([0.5 * (b - a) * w for a, b in panels])
    wt = wt * epr.cosine_taper(p, p_max, taper)
    ph = [np.exp(1j * p * d / hbar) * wt for d in delta]
    total = np.einsum("i,j,k->ijk", ph[0], ph[1], ph[2]).sum()
    return total / (2.0 * math.pi * hbar) ** 3


def check_delta_reconstruction() -> CheckResult:
    def body():
        x2, offset, p_max, sigma = 1.5, 1.0, 50.0, 1e-3
        out = {}
        ok = True
        for f in epr.standard_test_functions(center=0.3, width=1.0):
            mom = epr.weak_delta_momentum_route(f, x2, offset, p_max).real
            pos = epr.weak_delta_position_route(f, x2, offset, sigma).real
            exact = float(f(x2 - offset))
            routes, analytic = abs(mom - pos), max(abs(mom - exact), abs(pos - exact))
            ok &= routes < 1e-4 and analytic < 1e-3
            out[f.name] = {"momentum_route": mom, "position_route": pos, "exact": exact}
        r1, r2, r0 = np.array([0.2, -0.4, 1.0]), np.array([0.2, 0.6, 0.95]), np.array([0.0, 1.03, 0.0])
        sep = epr.reconstruct_delta_3d(r1, r2, r0, p_max)
        full = _tensor_gauss_3d(r1 - r2 + r0, p_max, 0.1)
        perm = epr.reconstruct_delta_3d(r1[[2, 0, 1]], r2[[2, 0, 1]], r0[[2, 0, 1]], p_max)
        # axes 0 and 2 on the constraint: reduces to the 1-D profile of axis 1
        on = np.array([r1[0] + r0[0], r2[1], r1[2] + r0[2]])
        reduced = epr.reconstruct_delta_3d(r1, on, r0, p_max)
        peak = epr.reconstruct_delta_1d(0.0, 0.0, 0.0, p_max).real
        one_axis = epr.reconstruct_delta_1d(r1[1], r2[1], r0[1], p_max)
        reduce_err = abs(reduced - one_axis * peak ** 2) / abs(reduced)
        sep_err = abs(sep - full) / abs(full)
        perm_err = abs(sep - perm) / abs(sep)
        ok &= sep_err < 1e-6 and perm_err < 1e-12 and reduce_err < 1e-6
        out["3d"] = {"separable_vs_tensor": sep_err, "permutation": perm_err,
                     "reduction_to_1d": reduce_err}
        out["ok"] = ok
        return out
    return _run(10, "delta reconstruction", 60.0, body)


CHECKS: dict[str, list[Callable[[], CheckResult]]] = {
    "tunneling": [check_tunneling_identity, check_inequalities, check_ledger_position_independence],
    "momentum": [check_de_broglie, check_eigenfield_roundtrip],
    "slit": [check_slit_series],
    "epr": [check_propagator, check_amplitude_law, check_epr_correlations,
            check_delta_reconstruction],
}


def run_suite(suite: str = "all") -> list[CheckResult]:
    if suite == "all":
        fns = [fn for group in CHECKS.values() for fn in group]
    elif suite in CHECKS:
        fns = CHECKS[suite]
    else:
        raise KeyError(f"unknown suite {suite!r}; choose from all, {', '.join(CHECKS)}")
    results = [fn() for fn in fns]
    return sorted(results, key=lambda r: r.number)
