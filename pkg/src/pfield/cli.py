"""Command-line front end.

Subcommands ``tunnel``, ``momentum``, ``slit``, ``epr``, ``verify`` and
``sweep``. Parameters come from flags or a JSON file given with ``--config``;
flags win. Exit codes: 0 ok, 1 verification failed, 2 bad configuration,
3 physics-domain error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import epr, momentum, position, tunneling
from .core import PhysicalParams, default_params
from .errors import NumericsError, PFError, PhysicsDomainError
from .numerics import Quadrature
from .output import csv_text, dumps, envelope, write_text
from .verify import gaussian_packet, run_suite

SUBCOMMANDS = ("tunnel", "momentum", "slit", "epr", "verify", "sweep")
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NUMERICS = 0, 1, 2, 3, 4


class ConfigError(PFError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# Scenario defaults; ``None`` marks a required value unless noted.
SCENARIO_DEFAULTS: dict[str, dict] = {
    "tunnel": {"energy": None, "v0": None, "width": 1.0, "kp1": None, "kp2": None,
               "phase1": 0.0, "phase2": 0.0, "samples": 11, "qm_reference": False},
    "momentum": {"pp": None, "ap": None, "x0": 0.0, "t0": 0.0, "times": None,
                 "spectrum": False, "packet_center": 0.0, "packet_width": 1.0,
                 "packet_momentum": None, "common_amplitude": 1.0, "p_points": 801},
    "slit": {"a": 0.0, "da": None, "n": 1, "b": [1.0], "truncation": None, "points": 41,
             "a0": 0.0, "vp": 1.0, "omega_bar": None},
    "epr": {"pp": None, "offset": None, "x1_0": 0.0, "cf": 0.0, "times": None,
            "ensemble": 0, "profile": False, "p_max": 50.0, "profile_points": 41,
            "spin": False},
    "verify": {"suite": "all"},
    "sweep": {"target": None, "grid": [], "set": [], "workers": 1},
}
OPTIONAL = {"kp1", "times", "packet_momentum", "truncation", "omega_bar"}
COMMON_KEYS = ("out", "output_path", "seed", "abs_tol", "rel_tol", "mass", "hbar")


@dataclass
class RunConfig:
    subcommand: str
    scenario: dict = field(default_factory=dict)
    output: str = "json"
    output_path: str | None = None
    seed: int = 0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    mass: float = 1.0
    hbar: float = 1.0

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(self.mass, self.hbar)

    @property
    def quadrature(self) -> Quadrature:
        return Quadrature(self.abs_tol, self.rel_tol)

    def validate(self) -> RunConfig:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.output not in ("json", "csv"):
            raise ConfigError(f"output must be json or csv, got {self.output!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        try:
            self.params, self.quadrature
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        missing = [k for k, v in self.scenario.items() if v is None and k not in OPTIONAL]
        if missing:
            raise ConfigError(f"{self.subcommand}: missing required parameter(s) "
                              + ", ".join("--" + m.replace("_", "-") for m in missing))
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d).validate()


def _common_parser() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--out", choices=("json", "csv"), default=None)
    g.add_argument("--output-path", default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--abs-tol", type=float, default=None)
    g.add_argument("--rel-tol", type=float, default=None)
    g.add_argument("--mass", type=float, default=None)
    g.add_argument("--hbar", type=float, default=None)
    g.add_argument("--config", default=None, help="JSON file of parameters; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="pfield", description="Particle-field model calculations.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    t = sub.add_parser("tunnel", parents=[common], help="barrier energy ledgers")
    t.add_argument("--energy", type=float)
    t.add_argument("--v0", type=float)
    t.add_argument("--width", type=float)
    t.add_argument("--kp1", type=float, help="particle kinetic energy before the barrier")
    t.add_argument("--kp2", type=float, help="particle kinetic energy inside the barrier")
    t.add_argument("--phase1", type=float)
    t.add_argument("--phase2", type=float)
    t.add_argument("--samples", type=int, help="ledger sample points per region")
    t.add_argument("--qm-reference", action="store_true", default=None,
                   help="also report the textbook transmission probability")

    m = sub.add_parser("momentum", parents=[common], help="momentum eigenfield preparation")
    m.add_argument("--pp", type=float, help="hidden particle momentum")
    m.add_argument("--ap", type=float, help="momentum-field amplitude")
    m.add_argument("--x0", type=float)
    m.add_argument("--t0", type=float)
    m.add_argument("--times", type=float, nargs="+")
    m.add_argument("--spectrum", action="store_true", default=None,
                   help="expand a Gaussian packet in eigenfields")
    m.add_argument("--packet-center", type=float)
    m.add_argument("--packet-width", type=float)
    m.add_argument("--packet-momentum", type=float)
    m.add_argument("--common-amplitude", type=float)
    m.add_argument("--p-points", type=int)

    s = sub.add_parser("slit", parents=[common], help="position measurement in a slit")
    s.add_argument("--a", type=float)
    s.add_argument("--da", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--b", type=float, nargs="+")
    s.add_argument("--truncation", type=int)
    s.add_argument("--points", type=int)
    s.add_argument("--a0", type=float)
    s.add_argument("--vp", type=float)
    s.add_argument("--omega-bar", type=float)

    e = sub.add_parser("epr", parents=[common], help="EPR pair")
    e.add_argument("--pp", type=float, help="relative momentum p_P1 - p_P2")
    e.add_argument("--offset", type=float, help="initial separation x2(0) - x1(0)")
    e.add_argument("--x1-0", type=float)
    e.add_argument("--cf", type=float)
    e.add_argument("--times", type=float, nargs="+")
    e.add_argument("--ensemble", type=int)
    e.add_argument("--profile", action="store_true", default=None)
    e.add_argument("--p-max", type=float)
    e.add_argument("--profile-points", type=int)
    e.add_argument("--spin", action="store_true", default=None)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.add_argument("--suite", choices=("all", "tunneling", "momentum", "slit", "epr"))

    w = sub.add_parser("sweep", parents=[common], help="parameter grid to CSV")
    w.add_argument("--target", choices=tuple(SWEEP_TARGETS))
    w.add_argument("--grid", action="append",
                   help="NAME=lin:LO:HI:N | NAME=geom:LO:HI:N | NAME=list:V1,V2,...")
    w.add_argument("--set", action="append", help="fixed NAME=VALUE")
    w.add_argument("--workers", type=int)
    return parser


def build_config(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("subcommand")
    file_values: dict = {}
    if ns.get("config"):
        try:
            file_values = json.loads(Path(ns["config"]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns['config']!r}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
    ns.pop("config", None)

    units = default_params()
    common = {"out": "csv" if cmd == "sweep" else "json", "output_path": None, "seed": 0,
              "abs_tol": 1e-10, "rel_tol": 1e-8, "mass": units.mass_m, "hbar": units.hbar}
    scenario = dict(SCENARIO_DEFAULTS[cmd])
    for source in (file_values, {k: v for k, v in ns.items() if v is not None}):
        for k, v in source.items():
            key = k.replace("-", "_")
            if key in common:
                common[key] = v
            elif key in scenario:
                scenario[key] = v
            else:
                raise ConfigError(f"{cmd}: unknown parameter {k!r}")
    return RunConfig(cmd, scenario, output=common["out"], output_path=common["output_path"],
                     seed=common["seed"], abs_tol=common["abs_tol"], rel_tol=common["rel_tol"],
                     mass=common["mass"], hbar=common["hbar"]).validate()


# -- subcommand bodies: each returns (result dict, csv header, csv rows) -------------------

def _tunnel(cfg: RunConfig):
    sc = cfg.scenario
    spec = tunneling.BarrierSpec(sc["energy"], sc["v0"], sc["width"], cfg.params)
    k, kappa = tunneling.wavenumbers(spec)
    s2 = tunneling.region2_state(spec, sc["kp2"], sc["phase2"])
    n = int(sc["samples"])
    region2 = {
        "amplitude": s2.amplitude, "particle_kinetic": s2.particle_kinetic,
        "field_energy": s2.field_energy(), "effective_kinetic": tunneling.effective_kinetic(spec, s2),
        "reduced_potential": spec.barrier_height + s2.field_energy(),
        "ledger": tunneling.energy_ledger(spec, s2, 0.0).as_dict(),
    }
    result = {"k": k, "kappa": kappa, "region_II": region2}
    rows = [("II", x, *tunneling.energy_ledger(spec, s2, x).as_dict().values())
            for x in np.linspace(0.0, spec.barrier_width, n)]
    if sc["kp1"] is not None:
        s1 = tunneling.region1_state(spec, sc["kp1"], sc["phase1"])
        result["region_I"] = {
            "amplitude": s1.amplitude, "particle_kinetic": s1.particle_kinetic,
            "field_energy": s1.field_energy(),
            "ledger": tunneling.energy_ledger(spec, s1, -spec.barrier_width).as_dict(),
        }
        result["consistency_residual"] = tunneling.total_energy_consistency(spec, s1, s2)
        rows = [("I", x, *tunneling.energy_ledger(spec, s1, x).as_dict().values())
                for x in np.linspace(-spec.barrier_width, -spec.barrier_width / n, n)] + rows
    if sc["qm_reference"]:
        result["qm_transmission_reference"] = {
            "value": tunneling.qm_transmission_reference(spec),
            "note": "standard quantum mechanics; not a prediction of the particle-field model",
        }
    header = ["region", "x", "particle_kinetic", "field_kinetic", "field_potential",
              "external_potential", "field_energy", "total"]
    return result, header, rows


def _momentum(cfg: RunConfig):
    sc = cfg.scenario
    prep = momentum.MomentumPrep(sc["pp"], sc["ap"], sc["t0"], sc["x0"], cfg.params)
    record = momentum.measure_momentum(prep)
    times = sc["times"] if sc["times"] is not None else [sc["t0"]]
    q = np.atleast_1d(momentum.pf_trajectory(prep, times))
    result = {"record": record.as_dict(),
              "trajectory": [{"t": float(t), "q": float(v)} for t, v in zip(times, q)]}
    header, rows = ["t", "q"], list(zip(map(float, times), map(float, q)))
    if sc["spectrum"]:
        p0 = sc["packet_momentum"] if sc["packet_momentum"] is not None else record.de_broglie_p
        c, w, hbar = sc["packet_center"], sc["packet_width"], cfg.hbar
        X = gaussian_packet(c, w, p0, hbar)
        xs = np.linspace(c - 14.0 * w, c + 14.0 * w, 2801)
        snap = momentum.FieldSnapshot.from_function(X, xs)
        half = 12.0 * hbar / (2.0 * w)
        ps = np.linspace(p0 - half, p0 + half, int(sc["p_points"]))
        phi = momentum.expand_field(snap, sc["common_amplitude"], ps, cfg.params, cfg.quadrature)
        phi_n, norm = momentum.normalize_density(phi, ps)
        result["spectrum"] = {"mean_momentum": momentum.mean_momentum(phi, ps),
                              "packet_momentum": p0, "norm_factor": norm}
        header, rows = ["p", "density"], list(zip(ps, np.abs(phi_n) ** 2))
    return result, header, rows


def _slit(cfg: RunConfig):
    sc = cfg.scenario
    spec = position.SlitSpec(sc["a"], sc["da"], sc["n"], tuple(sc["b"]), sc["truncation"],
                             cfg.params)
    xs = np.linspace(spec.slit_left, spec.slit_left + spec.slit_width, int(sc["points"]))
    f = position.f_series(spec, xs)
    q = position.pf_position(spec, xs)
    report = position.unfolding_energy(spec, sc["a0"], sc["vp"], sc["omega_bar"])
    result = {"mode_wavenumber": spec.mode_wavenumber, "shift_bound": spec.shift_bound(),
              "curve": [{"x": float(x), "q": float(v)} for x, v in zip(xs, q)],
              "unfolding": report.as_dict()}
    rows = list(zip(xs, xs - spec.slit_left, f, q))
    return result, ["x", "x_minus_a", "F", "q"], rows


def _epr(cfg: RunConfig):
    sc = cfg.scenario
    scn = epr.EprScenario(sc["offset"], sc["pp"], sc["x1_0"], sc["cf"], params=cfg.params)
    times = sc["times"] if sc["times"] is not None else [0.0, 1.0, 2.0]
    tr = epr.pair_tracks(scn, times)
    p1, p2 = epr.pair_momenta(scn)
    t_law = np.geomspace(1e-3, 1e3, 50)
    c_f = sc["cf"] if sc["cf"] != 0 else 1.0
    result = {
        "momenta": {"p1": p1, "p2": p2},
        "predictions": {"x2_0": epr.predict_partner_position(scn.x1_0, scn.offset),
                        "p2": epr.predict_partner_momentum(p1)},
        "tracks": [{"t": float(t), "x1": float(a), "x2": float(b), "x_rel": float(a - b)}
                   for t, a, b in zip(tr.t, tr.x1, tr.x2)],
        "amplitude_law": {
            "c_F": c_f,
            "sqrt_law": epr.amplitude_law_check(c_f, sc["pp"], t_law, params=cfg.params).as_dict(),
            "linear_law": epr.amplitude_law_check(c_f, sc["pp"], t_law,
                                                  epr.AmplitudeLaw.linear_law(c_f),
                                                  cfg.params).as_dict(),
        },
        "null_field": [{"form": r.form, "amplitude": r.amplitude, "is_null": r.is_null}
                       for r in epr.null_field_representations(scn)],
    }
    if sc["ensemble"]:
        ens = epr.sample_ensemble(int(sc["ensemble"]), int(cfg.seed))
        sums = [sum(epr.pair_momenta(ens.scenario(i, cfg.params))) for i in range(len(ens))]
        pos_fail = sum(ens.scenario(i).x2_0 - ens.x1_0[i] != ens.offset[i] for i in range(len(ens)))
        result["ensemble"] = {"size": len(ens), "seed": int(cfg.seed),
                              "max_abs_momentum_sum": float(np.max(np.abs(sums))),
                              "position_constraint_failures": int(pos_fail)}
    if sc["profile"]:
        width = 20.0 * cfg.hbar / sc["p_max"]
        center = scn.x2_0 - scn.offset
        xs = np.linspace(center - width, center + width, int(sc["profile_points"]))
        vals = epr.reconstruct_delta_1d(xs, scn.x2_0, scn.offset, sc["p_max"],
                                        params=cfg.params, q=cfg.quadrature)
        result["profile"] = [{"x1": float(x), "value": complex(v)} for x, v in zip(xs, vals)]
    if sc["spin"]:
        result["notes"] = [epr.SPIN_NOTE]
        print(epr.SPIN_NOTE, file=sys.stderr)
    rows = [(float(t), float(a), float(b), float(a - b)) for t, a, b in zip(tr.t, tr.x1, tr.x2)]
    return result, ["t", "x1", "x2", "x_rel"], rows


# -- sweeps ----------------------------------------------------------------------------------

SWEEP_TARGETS: dict[str, tuple[tuple[str, ...], dict]] = {
    "tunnel": (("energy", "v0", "kp1", "kp2", "k", "kappa", "r1", "r2", "field_energy_1",
                "field_energy_2", "effective_kinetic", "consistency"),
               {"energy": 1.0, "v0": 2.0, "kp1": None, "kp2": 1.0}),
    "momentum": (("pp", "ap", "p", "wavelength", "field_energy", "pf_velocity", "q0"),
                 {"pp": 1.0, "ap": 0.0, "x0": 0.0, "t0": 0.0}),
    "slit": (("a", "da", "n", "x_rel", "F", "q"),
             {"a": 0.0, "da": 0.1, "n": 1, "x_rel": 0.25, "b": 1.0}),
}


def sweep_row(target: str, p: dict, mass: float, hbar: float) -> tuple:
    params = PhysicalParams(mass, hbar)
    if target == "tunnel":
        spec = tunneling.BarrierSpec(p["energy"], p["v0"], params=params)
        kp1 = p["kp1"] if p["kp1"] is not None else 0.5 * p["energy"]
        s1 = tunneling.region1_state(spec, kp1)
        s2 = tunneling.region2_state(spec, p["kp2"])
        return (p["energy"], p["v0"], kp1, p["kp2"], s1.wavenumber, s2.wavenumber,
                s1.amplitude, s2.amplitude, s1.field_energy(), s2.field_energy(),
                tunneling.effective_kinetic(spec, s2),
                tunneling.total_energy_consistency(spec, s1, s2))
    if target == "momentum":
        prep = momentum.MomentumPrep(p["pp"], p["ap"], p["t0"], p["x0"], params)
        r = momentum.measure_momentum(prep)
        return (p["pp"], p["ap"], r.de_broglie_p, r.wavelength, r.field_energy,
                r.pf_velocity, r.pf_position_at_t0)
    spec = position.SlitSpec(p["a"], p["da"], int(p["n"]), (p["b"],), params=params)
    x = p["a"] + p["x_rel"] * p["da"]
    return (p["a"], p["da"], int(p["n"]), p["x_rel"], float(position.f_series(spec, x)),
            float(position.pf_position(spec, x)))


def parse_grid(text: str) -> tuple[str, list[float]]:
    try:
        name, spec = text.split("=", 1)
        kind, _, rest = spec.partition(":")
        if kind == "list":
            values = [float(v) for v in rest.split(",") if v.strip()]
        elif kind in ("lin", "geom"):
            lo, hi, n = rest.split(":")
            fn = np.linspace if kind == "lin" else np.geomspace
            values = [float(v) for v in fn(float(lo), float(hi), int(n))]
        else:
            raise ValueError(kind)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {text!r}") from exc
    return name.strip(), sorted(values)


def _sweep(cfg: RunConfig):
    sc = cfg.scenario
    target = sc["target"]
    header, base = SWEEP_TARGETS[target]
    values = dict(base)
    for item in sc["set"] or []:
        name, _, val = item.partition("=")
        if name not in base:
            raise ConfigError(f"sweep {target}: cannot set {name!r}")
        values[name] = float(val)
    axes = [parse_grid(g) for g in sc["grid"] or []]
    if len(axes) > 2:
        raise ConfigError("sweeps cover at most two parameters")
    for name, _ in axes:
        if name not in base:
            raise ConfigError(f"sweep {target}: unknown grid parameter {name!r}")
    names = [a[0] for a in axes]
    points = [dict(values, **dict(zip(names, combo)))
              for combo in itertools.product(*(a[1] for a in axes))] if axes else []
    args = [(target, pt, cfg.mass, cfg.hbar) for pt in points]
    workers = int(sc["workers"] or 1)
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_row, *zip(*args)))
    else:
        rows = [sweep_row(*a) for a in args]
    result = {"target": target, "columns": list(header),
              "rows": [dict(zip(header, r)) for r in rows]}
    return result, list(header), rows


def _verify(cfg: RunConfig):
    results = run_suite(cfg.scenario["suite"])
    result = {"suite": cfg.scenario["suite"], "passed": all(r.passed for r in results),
              "checks": [r.as_dict() for r in results]}
    rows = [(r.number, r.name, "PASS" if r.passed else "FAIL", r.elapsed) for r in results]
    return result, ["number", "name", "status", "elapsed"], rows, results


HANDLERS = {"tunnel": _tunnel, "momentum": _momentum, "slit": _slit, "epr": _epr,
            "sweep": _sweep}


def run(cfg: RunConfig) -> int:
    """Execute one validated configuration and write its artifact."""
    if cfg.subcommand == "verify":
        result, header, rows, checks = _verify(cfg)
        print("\n".join(r.line() for r in checks))
        print(f"{sum(r.passed for r in checks)}/{len(checks)} checks passed")
        status = EXIT_OK if result["passed"] else EXIT_VERIFY
        if not cfg.output_path:
            return status
    else:
        result, header, rows = HANDLERS[cfg.subcommand](cfg)
        status = EXIT_OK
    if cfg.output == "csv":
        text = csv_text(header, rows)
    else:
        text = dumps(envelope(cfg.subcommand, cfg.to_dict(), result))
    write_text(text, cfg.output_path)
    return status


def _error_record(exc: Exception, code: int) -> str:
    return json.dumps({"schema_version": "1",
                       "error": {"type": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}})


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, PhysicsDomainError):
        return EXIT_PHYSICS
    if isinstance(exc, NumericsError):
        return EXIT_NUMERICS
    return EXIT_CONFIG


def main(argv: list[str] | None = None) -> int:
    try:
        return run(build_config(argv))
    except (PFError, ValueError) as exc:
        code = exit_code(exc)
        print(_error_record(exc, code), file=sys.stderr)
        return code

if __name__ == "__main__":
    raise SystemExit(main())
