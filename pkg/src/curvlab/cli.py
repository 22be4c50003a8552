"""Command-line front end.

Subcommands: bounds, simulate, verify-curvature, verify-t2, verify-rte,
mixing, selftest.  Configuration is a flat JSON file (--config) whose keys are
overridable by command-line flags; unknown keys are rejected.  Every run
writes one CSV per experiment plus a manifest.json echoing the fully resolved
config, so a run is reproducible byte-for-byte from its own artifacts.

Exit codes: 0 all checks passed, 2 at least one inequality failed,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import platform
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__, bounds
from .harness import (
    MixingCurve,
    VerificationReport,
    mixing_curve,
    stationarity_check,
    verify_curvature,
    verify_def_t2_ou,
    verify_def_t2_ps_grid,
    verify_rte_ou,
    verify_rte_ps_grid,
)
from .kernels import GridOperator, KernelSpec, gaussian_pushforward, run_chain, stationary_gaussian
from .model import (
    GaussianMeasure,
    dirac,
    grid_from_gaussian,
    grid_window,
    quadratic_potential,
)

CSV_HEADER = ["case", "inputs", "lhs", "rhs", "std_error", "margin", "pass"]

SUBCOMMANDS = ("bounds", "simulate", "verify-curvature", "verify-t2", "verify-rte",
               "mixing", "selftest")


def _fmt(x) -> str:
    """17 significant digits: doubles round-trip exactly."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass
class ScenarioConfig:
    """Flat scenario record; field names double as config keys and CLI flags."""

    experiment: str = ""
    family: str = ""            # bounds: lmc | ps | ld | shift
    kernel: str = "lmc"         # simulate / verify-curvature: lmc | ps
    scenario: str = "ou"        # verify-t2 / verify-rte: ou | ps-grid
    alpha: float = 1.0
    beta: float | None = None
    L: float = 0.0
    dim: int = 1
    h_kind: str = "zero"
    h_amp: float = 0.0
    h_freq: float = 0.0
    h_scale: float = 0.0
    h: float | None = None
    T: float | None = None
    n_steps: int | None = None
    p: float = 2.0
    K: float | None = None
    M: float | None = None
    A: float | None = None
    w2: float | None = None
    J: float = 0.0
    S: float = 0.0
    cp: float | None = None
    t0: float | None = None
    x0: float = 3.0
    init_kind: str = "dirac"    # dirac | gaussian
    init_mean: float = 0.0
    init_var: float = 1.0
    n_pairs: int = 20
    pair_scale: float = 2.0
    n_samples: int = 200_000
    n_test: int = 100
    n_particles: int = 100_000
    eps_list: tuple = (0.25,)
    n_grid: int = 8192
    grid_span: float = 12.0
    max_steps: int = 2000
    seed: int = 0
    out: str = "out"

    def resolved_beta(self) -> float:
        return self.alpha if self.beta is None else self.beta

    def validate(self) -> None:
        if self.experiment and self.experiment not in SUBCOMMANDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.alpha < 0:
            raise ConfigError("alpha >= 0 violated")
        if self.beta is not None and self.beta < self.alpha:
            raise ConfigError("alpha <= beta violated")
        if self.L < 0:
            raise ConfigError("L >= 0 violated")
        if self.h is not None and self.h <= 0:
            raise ConfigError("h > 0 violated")
        if self.T is not None and self.T <= 0:
            raise ConfigError("T > 0 violated")
        if self.n_steps is not None and self.n_steps < 0:
            raise ConfigError("n_steps >= 0 violated")
        if self.kernel in ("lmc", "grad_step") and self.h is not None:
            b = self.resolved_beta()
            if b > 0 and self.h > 1.0 / b + 1e-12:
                raise ConfigError("h > 1/beta")
        if self.h_kind == "sinusoid" and self.h_amp * self.h_freq > self.L + 1e-12:
            raise ConfigError("sup|grad H| = amp*freq <= L violated")
        if self.h_kind == "smoothed_norm" and self.h_scale > self.L + 1e-12:
            raise ConfigError("sup|grad H| = scale <= L violated")
        if not all(0.0 < e < 1.0 for e in self.eps_list):
            raise ConfigError("eps_list entries must lie in (0, 1)")
        if self.n_grid < 64:
            raise ConfigError("n_grid >= 64 violated")

    def potential(self):
        return quadratic_potential(self.alpha, dim=self.dim, beta=self.resolved_beta(),
                                   h_kind=self.h_kind, h_amp=self.h_amp,
                                   h_freq=self.h_freq, h_scale=self.h_scale,
                                   lip_h=self.L if self.h_kind != "zero" else 0.0)

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["eps_list"] = list(self.eps_list)
        return d


class ConfigError(ValueError):
    pass


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def config_from_mapping(mapping: dict) -> ScenarioConfig:
    unknown = sorted(set(mapping) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    kwargs = {}
    for key, val in mapping.items():
        if key == "eps_list":
            val = tuple(float(v) for v in val)
        kwargs[key] = val
    cfg = ScenarioConfig(**kwargs)
    cfg.validate()
    return cfg


def parse_config(path: str | None, overrides: dict) -> ScenarioConfig:
    """Load JSON config (if given), apply CLI overrides, validate."""
    mapping: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            mapping = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(mapping, dict):
            raise ConfigError("config must be a JSON object")
    mapping.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(mapping)


# ---------------------------------------------------------------------------
# result emission
# ---------------------------------------------------------------------------

def _inputs_cell(inputs: dict) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in inputs.items())


def report_csv_bytes(report: VerificationReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in report.cases:
        writer.writerow([c.case, _inputs_cell(c.inputs), _fmt(c.lhs), _fmt(c.rhs),
                         _fmt(c.std_error), _fmt(c.margin), _fmt(c.passed)])
    return buf.getvalue().encode()


def curve_csv_bytes(curve: MixingCurve) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "time", "tv"])
    for k, (t, v) in enumerate(zip(curve.times, curve.tv)):
        writer.writerow([k, _fmt(float(t)), _fmt(float(v))])
    return buf.getvalue().encode()


def emit_results(named_payloads: dict, out_dir: str, config: ScenarioConfig,
                 extra: dict | None = None) -> dict:
    """Write named byte payloads plus a manifest; identical inputs give
    byte-identical outputs (no timestamps)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, payload in named_payloads.items():
        path = out / name
        try:
            path.write_bytes(payload)
        except OSError as exc:
            raise RuntimeError(f"failed writing {path}: {exc}") from exc
        entries.append({"file": name, "sha256": hashlib.sha256(payload).hexdigest(),
                        "bytes": len(payload)})
    manifest = {
        "files": entries,
        "config": config.echo(),
        "seed": config.seed,
        "versions": {
            "curvlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    if extra:
        manifest["summary"] = extra
    data = json.dumps(manifest, sort_keys=True, indent=2).encode() + b"\n"
    (out / "manifest.json").write_bytes(data)
    return manifest


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_bounds(cfg: ScenarioConfig) -> int:
    records = []

    def rec(op, up_to_constant=False, **values):
        records.append({"op": op, "up_to_constant": up_to_constant,
                        **{k: v for k, v in values.items() if v is not None}})

    fam = cfg.family
    if fam not in ("lmc", "ps", "ld", "shift"):
        raise ConfigError("bounds needs family in {lmc, ps, ld, shift}")
    if fam == "lmc":
        if cfg.h is None:
            raise ConfigError("lmc bounds need h")
        cert = bounds.curvature_lmc(cfg.alpha, cfg.resolved_beta(), cfg.L, cfg.h, cfg.p)
        rec("curvature_lmc", p=cert.p, K=cert.K, M=cert.M)
        if cfg.n_steps:
            it = bounds.curvature_iterate(cert, cfg.n_steps)
            rec("curvature_iterate", N=cfg.n_steps, K=it.K, M=it.M)
    elif fam == "ps":
        if cfg.h is None:
            raise ConfigError("ps bounds need h")
        cert = bounds.curvature_ps(cfg.alpha, cfg.L, cfg.h, cfg.p)
        rec("curvature_ps", p=cert.p, K=cert.K, M=cert.M)
        if cfg.n_steps:
            it = bounds.curvature_iterate(cert, cfg.n_steps)
            rec("curvature_iterate", N=cfg.n_steps, K=it.K, M=it.M)
            t2 = bounds.def_t2_ps(cfg.alpha, cfg.L, cfg.h, cfg.n_steps, cfg.J, cfg.S)
            rec("def_t2_ps", N=cfg.n_steps, A=t2.A, B=t2.B)
            if cfg.w2 is not None:
                rec("rte_ps", value=bounds.rte_ps(cfg.alpha, cfg.L, cfg.h, cfg.n_steps, cfg.w2))
        if cfg.cp is not None and cfg.alpha > 0:
            wb = bounds.wmix_bound_ps(cfg.alpha, cfg.L, cfg.h, cfg.cp)
            rec("wmix_bound_ps", up_to_constant=True, value=wb.value)
    elif fam == "ld":
        if cfg.T is None:
            raise ConfigError("ld bounds need T")
        t2 = bounds.def_t2_ld(cfg.alpha, cfg.L, cfg.T, cfg.J, cfg.S)
        rec("def_t2_ld", T=cfg.T, A=t2.A, B=t2.B)
        if cfg.w2 is not None:
            rec("rte_ld", value=bounds.rte_ld(cfg.alpha, cfg.L, cfg.T, cfg.w2))
        if cfg.alpha > 0:
            rec("poincare_bound", value=bounds.poincare_bound(cfg.alpha, cfg.L))
            if cfg.cp is not None and cfg.t0 is not None:
                wb = bounds.wmix_bound_ld(cfg.alpha, cfg.L, cfg.cp, cfg.t0, cfg.J, cfg.S)
                rec("wmix_bound_ld", up_to_constant=True, value=wb.value,
                    poincare_free=wb.poincare_free)
    else:  # shift
        if cfg.K is None or cfg.M is None or cfg.A is None or not cfg.n_steps:
            raise ConfigError("shift bounds need K, M, A, n_steps")
        sched = bounds.shift_opt_closed(cfg.n_steps, cfg.K, cfg.M, cfg.A)
        dp = bounds.shift_opt_dp(cfg.n_steps, cfg.K, cfg.M, cfg.A)
        rec("shift_opt_closed", N=cfg.n_steps, value=sched.value, etas=list(sched.etas))
        rec("shift_opt_dp", N=cfg.n_steps, value=dp)
    payload = json.dumps({"records": records, "config": cfg.echo()},
                         sort_keys=True, indent=2).encode() + b"\n"
    sys.stdout.write(payload.decode())
    emit_results({"bounds.json": payload}, cfg.out, cfg)
    return 0


def _cmd_simulate(cfg: ScenarioConfig) -> int:
    if cfg.h is None:
        raise ConfigError("simulate needs h")
    pot = cfg.potential()
    kernel = KernelSpec(kind=cfg.kernel, h=cfg.h, potential=pot)
    if cfg.init_kind == "dirac":
        init = dirac(np.full(cfg.dim, cfg.x0))
    else:
        init = GaussianMeasure(mean=(cfg.init_mean,) * cfg.dim, var=(cfg.init_var,) * cfg.dim)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    n_steps = cfg.n_steps or 10
    cloud = run_chain(kernel, init, 0, rng, n_particles=cfg.n_particles)
    rows = []
    exact = init if pot.h_kind == "zero" else None
    for k in range(n_steps + 1):
        mean = float(cloud.points.mean())
        var = float(cloud.points.var())
        row = {"step": k, "mean": mean, "var": var}
        if exact is not None:
            row["exact_mean"] = float(exact.mean_arr.mean())
            row["exact_var"] = float(exact.var_arr.mean())
            if k < n_steps:
                exact = gaussian_pushforward(kernel, exact)
        rows.append(row)
        if k < n_steps:
            cloud = run_chain(kernel, cloud, 1, rng)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(h)) for h in header])
    emit_results({"simulate.csv": buf.getvalue().encode()}, cfg.out, cfg)
    print(f"simulate: {n_steps} steps x {cloud.n} particles written to {cfg.out}/simulate.csv")
    return 0


def _random_pairs(cfg: ScenarioConfig):
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    return [(rng.uniform(-cfg.pair_scale, cfg.pair_scale, cfg.dim),
             rng.uniform(-cfg.pair_scale, cfg.pair_scale, cfg.dim))
            for _ in range(cfg.n_pairs)]


def _finish_verification(name: str, report: VerificationReport, cfg: ScenarioConfig) -> int:
    fname = f"{name}_s{cfg.seed}.csv"
    emit_results({fname: report_csv_bytes(report)}, cfg.out, cfg,
                 extra={"experiment": report.experiment, "n_pass": report.n_pass,
                        "n_fail": report.n_fail, **report.notes})
    print(f"{name}: {report.n_pass}/{len(report.cases)} cases passed -> {cfg.out}/{fname}")
    return 0 if report.all_passed else 2


def _cmd_verify_curvature(cfg: ScenarioConfig) -> int:
    if cfg.h is None:
        raise ConfigError("verify-curvature needs h")
    report = verify_curvature(cfg.kernel, cfg.potential(), cfg.h, _random_pairs(cfg),
                              n_samples=cfg.n_samples, p=cfg.p, seed=cfg.seed)
    return _finish_verification("verify_curvature", report, cfg)


def _cmd_verify_t2(cfg: ScenarioConfig) -> int:
    if cfg.scenario == "ou":
        if cfg.T is None:
            raise ConfigError("verify-t2 scenario ou needs T")
        report = verify_def_t2_ou(alpha=cfg.alpha, T=cfg.T, x0=cfg.x0,
                                  n_test=cfg.n_test, seed=cfg.seed, dim=cfg.dim)
    elif cfg.scenario == "ps-grid":
        if cfg.h is None or not cfg.n_steps:
            raise ConfigError("verify-t2 scenario ps-grid needs h and n_steps")
        init = GaussianMeasure(mean=(cfg.init_mean,), var=(cfg.init_var,))
        report = verify_def_t2_ps_grid(cfg.potential(), cfg.h, cfg.n_steps, init,
                                       n_test=cfg.n_test, seed=cfg.seed,
                                       n_grid=cfg.n_grid, span=cfg.grid_span)
    else:
        raise ConfigError("verify-t2 scenario must be ou or ps-grid")
    return _finish_verification("verify_t2", report, cfg)


def _cmd_verify_rte(cfg: ScenarioConfig) -> int:
    if cfg.scenario == "ou":
        if cfg.T is None:
            raise ConfigError("verify-rte scenario ou needs T")
        pairs = None
        if cfg.w2 is not None:
            pairs = [(dirac(0.0), dirac(cfg.w2))]
        report = verify_rte_ou(alpha=cfg.alpha, T=cfg.T, pairs=pairs,
                               n_pairs=cfg.n_pairs, seed=cfg.seed, dim=cfg.dim)
    elif cfg.scenario == "ps-grid":
        if cfg.h is None or not cfg.n_steps:
            raise ConfigError("verify-rte scenario ps-grid needs h and n_steps")
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
        pairs = []
        for _ in range(cfg.n_pairs):
            m = rng.uniform(-cfg.pair_scale, cfg.pair_scale, 2)
            s = rng.uniform(0.6, 1.6, 2)
            pairs.append((GaussianMeasure((m[0],), (s[0] ** 2,)),
                          GaussianMeasure((m[1],), (s[1] ** 2,))))
        report = verify_rte_ps_grid(cfg.potential(), cfg.h, cfg.n_steps, pairs,
                                    n_grid=cfg.n_grid, span=cfg.grid_span, seed=cfg.seed)
    else:
        raise ConfigError("verify-rte scenario must be ou or ps-grid")
    return _finish_verification("verify_rte", report, cfg)


def _cmd_mixing(cfg: ScenarioConfig) -> int:
    pot = cfg.potential()
    if cfg.kernel == "ou":
        if cfg.alpha <= 0:
            raise ConfigError("mixing with the exact OU kernel needs alpha > 0")
        dt = cfg.h or 0.01
        kernel = KernelSpec(kind="ou_exact", h=dt, potential=pot)
        target = stationary_gaussian(pot)
        lo, hi = grid_window(GaussianMeasure((cfg.x0,), (1e-4,)), target, span=cfg.grid_span)
        tgt_grid = grid_from_gaussian(target, lo, hi, cfg.n_grid)
        m0 = cfg.x0 * math.exp(-cfg.alpha * dt)
        v0 = (1.0 - math.exp(-2.0 * cfg.alpha * dt)) / cfg.alpha
        init = grid_from_gaussian(GaussianMeasure((m0,), (v0,)), lo, hi, cfg.n_grid)
        offset = dt
    elif cfg.kernel in ("lmc", "ps"):
        if cfg.h is None:
            raise ConfigError("grid mixing needs h")
        kernel = KernelSpec(kind=cfg.kernel, h=cfg.h, potential=pot)
        ref_sd = math.sqrt(1.0 / max(pot.alpha, 0.25) + cfg.h)
        lo = min(cfg.x0, 0.0) - cfg.grid_span * ref_sd
        hi = max(cfg.x0, 0.0) + cfg.grid_span * ref_sd
        x = np.linspace(lo, hi, cfg.n_grid)
        from .kernels import _u_value_1d
        from .model import GridDensity

        boltzmann = GridDensity(lo=lo, hi=hi, values=np.exp(-_u_value_1d(pot, x)))
        if cfg.kernel == "ps":
            tgt_grid = boltzmann
        else:
            from .harness import grid_fixed_point
            tgt_grid = grid_fixed_point(kernel, boltzmann, tol=1e-10)
        init_g = GaussianMeasure((cfg.x0,), (cfg.init_var,))
        init = grid_from_gaussian(init_g, lo, hi, cfg.n_grid)
        offset = 0.0
    else:
        raise ConfigError("mixing kernel must be ou, lmc, or ps")
    curve = mixing_curve(kernel, init, tgt_grid, max_steps=cfg.max_steps,
                         eps_list=cfg.eps_list)
    summary = {"reached": curve.reached, "continuous_time": curve.continuous_time,
               "stationarity_defect": stationarity_check(kernel, tgt_grid)}
    for eps in cfg.eps_list:
        if eps in curve.t_mix:
            summary[f"t_mix({_fmt(eps)})"] = curve.t_mix[eps] + offset
        if eps in curve.w_mix:
            summary[f"w_mix({_fmt(eps)})"] = curve.w_mix[eps]
    if cfg.alpha > 0 and curve.w_mix:
        eps0 = cfg.eps_list[0]
        if eps0 in curve.t_mix and eps0 in curve.w_mix:
            cp = cfg.cp if cfg.cp is not None else bounds.poincare_bound(cfg.alpha, cfg.L)
            t0 = curve.t_mix[eps0] + offset - curve.w_mix[eps0]
            wb = bounds.wmix_bound_ld(cfg.alpha, cfg.L, cp, t0, cfg.J, cfg.S)
            summary["wmix_bound_ld"] = wb.value
            summary["wmix_bound_up_to_constant"] = wb.up_to_constant
            summary["ratio_bound_over_measured"] = wb.value / max(curve.w_mix[eps0], 1e-300)
    emit_results({"mixing_curve.csv": curve_csv_bytes(curve)}, cfg.out, cfg, extra=summary)
    print("mixing:", json.dumps(summary, sort_keys=True, default=_fmt))
    return 0


def _cmd_selftest(cfg: ScenarioConfig) -> int:
    from .acceptance import run_all

    results = run_all(verbose=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["criterion", "description", "pass", "elapsed_s", "details"])
    for r in results:
        detail = ";".join(f"{k}={_fmt(v)}" for k, v in r.details.items())
        writer.writerow([r.crit_id, r.description, _fmt(r.passed),
                         _fmt(round(r.elapsed_s, 3)), detail])
    all_pass = all(r.passed for r in results)
    emit_results({"selftest.csv": buf.getvalue().encode()}, cfg.out, cfg,
                 extra={"all_pass": all_pass,
                        "total_s": round(sum(r.elapsed_s for r in results), 3)})
    print("selftest:", "ALL PASS" if all_pass else "FAILURES PRESENT")
    return 0 if all_pass else 2


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its keys")
    for f in dataclasses.fields(ScenarioConfig):
        if f.name in ("experiment", "eps_list"):
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name in ("dim", "n_steps", "n_pairs", "n_samples", "n_test", "n_particles",
                      "n_grid", "max_steps", "seed"):
            sub.add_argument(flag, type=int, default=None, dest=f.name)
        elif f.name in ("family", "kernel", "scenario", "h_kind", "init_kind", "out"):
            sub.add_argument(flag, type=str, default=None, dest=f.name)
        else:
            sub.add_argument(flag, type=float, default=None, dest=f.name)
    sub.add_argument("--eps-list", type=str, default=None, dest="eps_list",
                     help="comma-separated accuracy levels, e.g. 0.25,0.1")
    # family shorthands used by the bounds subcommand
    sub.add_argument("--lmc", action="store_const", const="lmc", dest="family")
    sub.add_argument("--ps", action="store_const", const="ps", dest="family")
    sub.add_argument("--ld", action="store_const", const="ld", dest="family")
    sub.add_argument("--shift", action="store_const", const="shift", dest="family")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab",
        description="Curvature certificates, transport-entropy propagation, and "
                    "sampler verification for log-Lipschitz perturbations of "
                    "log-concave targets.")
    parser.add_argument("--version", action="version", version=f"curvlab {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subs.add_parser(name)
        _add_common_flags(sub)
    return parser


def dispatch(subcommand: str, cfg: ScenarioConfig) -> int:
    handlers = {
        "bounds": _cmd_bounds,
        "simulate": _cmd_simulate,
        "verify-curvature": _cmd_verify_curvature,
        "verify-t2": _cmd_verify_t2,
        "verify-rte": _cmd_verify_rte,
        "mixing": _cmd_mixing,
        "selftest": _cmd_selftest,
    }
    return handlers[subcommand](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("subcommand", "config") and v is not None}
    if "eps_list" in overrides:
        overrides["eps_list"] = tuple(float(e) for e in str(overrides["eps_list"]).split(","))
    try:
        cfg = parse_config(args.config, overrides)
        cfg.experiment = args.subcommand
        return dispatch(args.subcommand, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
