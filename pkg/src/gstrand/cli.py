"""Command-line driver: ``gstrand simulate|verify|series|ode --config <path>``.

Exit codes: 0 success, 2 invalid input, 3 blow-up, 4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, ConfigParseError, RunConfig, parse_config
from .conservation import Monitor, eval_H_so3
from .dynamics import BlowUpError, CFLError, check_cfl, check_se2_split, integrate
from .closures import diagnose
from .filament import reconstruct_filament
from .grid import GridError, GridSpec, integrate_s
from .integrability import constraint_residuals, rho_closed_forms, riccati_densities, zcr_residual_semidiscrete
from .io import SnapshotError

EXIT_OK, EXIT_INVALID, EXIT_BLOWUP, EXIT_VERIFY = 0, 2, 3, 4
SE2_TOL = 1e-12


class Run:
    """Shared plumbing for one CLI invocation: output dir, printing, thread cap."""

    def __init__(self, cfg: RunConfig, out: str | None, quiet: bool):
        self.cfg = cfg
        self.out = Path(out or cfg.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.quiet = quiet
        if out:
            cfg.output_dir = str(out)
        io.write_json(self.out / "config.resolved", cfg.resolved())

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)


def threads_from_env() -> int:
    raw = os.environ.get("GSTRAND_THREADS")
    if raw is None or raw == "":
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("GSTRAND_THREADS", f"expected a nonnegative integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("GSTRAND_THREADS", "must be nonnegative")
    return n


def _lam_key(lam: float) -> str:
    return io.fmt(lam)


def _zcr_all(state, cfg: RunConfig, threads: int = 0) -> dict:
    def one(lam):
        return zcr_residual_semidiscrete(state, cfg.closure, lam, cfg.scheme)

    if threads > 1 and len(cfg.lambdas) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            vals = list(ex.map(one, cfg.lambdas))
    else:
        vals = [one(lam) for lam in cfg.lambdas]
    return {_lam_key(lam): v for lam, v in zip(cfg.lambdas, vals)}


def _record(step: int, state, cfg: RunConfig, mon: Monitor, threads: int = 0) -> dict:
    t = step * cfg.dt
    rep = mon(t, state)
    rec = {"t": t, "step": step}
    rec.update(rep.values)
    if state.grid.n > 1:
        rec["zcr"] = _zcr_all(state, cfg, threads)
    rec["constraints"] = constraint_residuals(state, diagnose(state, cfg.closure), cfg.closure).as_dict()
    rec["drift"] = rep.relative_drift
    if cfg.group == "se2":
        rec["se2_split"] = check_se2_split(state)
    return rec


def _snapshot(run: Run, state, step: int, name: str | None = None, extra: dict | None = None) -> Path:
    cfg = run.cfg
    snapdir = run.out / "snapshots"
    snapdir.mkdir(exist_ok=True)
    path = snapdir / (name or f"snap_{step:07d}.csv")
    meta = {"t": step * cfg.dt, "step": step, "config_group": cfg.group, "scheme": cfg.scheme}
    meta.update(extra or {})
    io.write_snapshot(path, state, meta)
    if state.group == "se3" and state.grid.n > 1:
        fil = reconstruct_filament(state)
    else:
        fil = None
    if fil is not None:
        fdir = run.out / "filaments"
        fdir.mkdir(exist_ok=True)
        io.write_filament(fdir / path.name.replace("snap_", "filament_"), fil.s, fil.points)
    return path


class SplitBroken(RuntimeError):
    pass


def _evolve(run: Run, state0, ode: bool = False):
    """Time-step with diagnostics; returns (records, final state, exit code)."""
    cfg = run.cfg
    mon = Monitor(cfg.closure, ode_mode=ode)
    threads = threads_from_env()
    records = []
    snaps = {"last": state0}

    with io.NDJSONWriter(run.out / "diagnostics.ndjson") as nd:

        def cb(step, state):
            if step % cfg.output_cadence == 0 or step == cfg.nsteps:
                rec = _record(step, state, cfg, mon, threads)
                nd.write(rec)
                records.append(rec)
                if cfg.group == "se2" and rec["se2_split"] > SE2_TOL:
                    raise SplitBroken(f"planar split broken at step {step}: {rec['se2_split']:.3e}")
            if step % cfg.snapshot_cadence == 0 and step != cfg.nsteps:
                _snapshot(run, state, step)
            snaps["last"] = state

        try:
            final = integrate(state0, cfg.closure, cfg.dt, cfg.nsteps, cfg.scheme, callback=cb, cadence=1, check=False)
        except BlowUpError as e:
            good = e.last_good
            _snapshot(run, good, e.step - 1, "final_state.csv", {"blowup": True, "failed_step": e.step})
            run.say(f"blow-up at step {e.step}; last finite state written to snapshots/final_state.csv")
            return records, good, EXIT_BLOWUP
        except SplitBroken as e:
            run.say(str(e))
            return records, snaps["last"], EXIT_VERIFY
    _snapshot(run, final, cfg.nsteps, "final_state.csv")
    return records, final, EXIT_OK


def _plots_for_run(run: Run, records: list, final) -> None:
    if not run.cfg.plots or not records:
        return
    from . import plotting

    plotting.plot_drift(records, run.out / "drift.png")
    if "zcr" in records[0]:
        plotting.plot_zcr(records, run.out / "zcr.png")
    if final.group == "se3" and final.grid.n > 1:
        fil = reconstruct_filament(final)
        plotting.plot_filament(fil.points, run.out / "filament.png", f"t = {records[-1]['t']:.4g}")


def run_simulate(cfg: RunConfig, out=None, quiet=False) -> int:
    run = Run(cfg, out, quiet)
    check_cfl(cfg.dt, cfg.grid)
    state0 = cfg.initial_state()
    records, final, code = _evolve(run, state0)
    _plots_for_run(run, records, final)
    if code == EXIT_OK and records:
        last = records[-1]
        run.say(f"{cfg.group}: {cfg.nsteps} steps to t={last['t']:.6g}, max drift {max(last['drift'].values()):.3e}")
    return code


def run_ode(cfg: RunConfig, out=None, quiet=False) -> int:
    cfg.grid = GridSpec(1, cfg.grid.length)
    dropped = any(spec["modes"] for spec in cfg.initial.values())
    for spec in cfg.initial.values():
        spec["modes"] = []
    run = Run(cfg, out, quiet)
    if dropped:
        run.say("ode: Fourier modes ignored, uniform data built from offsets")
    state0 = cfg.initial_state()
    records, final, code = _evolve(run, state0, ode=True)
    _plots_for_run(run, records, final)
    if code == EXIT_OK and records:
        run.say(f"{cfg.group} ODE mode: {cfg.nsteps} steps, max drift {max(records[-1]['drift'].values()):.3e}")
    return code


def run_verify(cfg: RunConfig, out=None, quiet=False) -> int:
    run = Run(cfg, out, quiet)
    threads = threads_from_env()
    check_cfl(cfg.dt, cfg.grid)
    ctol, ztol = cfg.verify["constraint_tol"], cfg.verify["zcr_tol"]
    mon = Monitor(cfg.closure)
    records = []

    def cb(step, state):
        records.append(_record(step, state, cfg, mon, threads))

    code = EXIT_OK
    try:
        integrate(cfg.initial_state(), cfg.closure, cfg.dt, int(cfg.verify["steps"]), cfg.scheme,
                  callback=cb, cadence=cfg.output_cadence, check=False)
    except BlowUpError as e:
        run.say(f"blow-up at step {e.step} during verification")
        code = EXIT_BLOWUP

    failures = []
    for rec in records:
        for row, v in rec["constraints"].items():
            if v > ctol:
                failures.append({"t": rec["t"], "kind": "constraint", "row": row, "power": int(row[1]), "value": v})
        for lam, v in rec.get("zcr", {}).items():
            if v > ztol:
                failures.append({"t": rec["t"], "kind": "zcr", "lambda": float(lam), "value": v})
    verdict = {
        "pass": not failures and code == EXIT_OK,
        "group": cfg.group,
        "thresholds": {"constraint": ctol, "zcr": ztol},
        "failures": failures,
        "records": records,
    }
    io.write_json(run.out / "verify.json", verdict)
    if cfg.plots and records:
        from . import plotting

        plotting.plot_verify(records, run.out / "verify.png")
    if failures:
        rows = sorted({f"lambda^{f['power']} constraint ({f['row']})" for f in failures if f["kind"] == "constraint"})
        lams = sorted({f["lambda"] for f in failures if f["kind"] == "zcr"})
        msg = "FAIL: " + ", ".join(rows)
        if lams:
            msg += ("; " if rows else "") + "zcr at lambda " + ", ".join(io.fmt(x) for x in lams)
        run.say(msg)
        return EXIT_VERIFY if code == EXIT_OK else code
    if code == EXIT_OK:
        run.say(f"PASS: {len(records)} sampled states, constraints <= {ctol:g}, zcr <= {ztol:g}")
    return code


def run_series(cfg: RunConfig, snapshot_path, out=None, quiet=False) -> int:
    run = Run(cfg, out, quiet)
    state, meta = io.read_snapshot(snapshot_path)
    if state.group != "so3" or cfg.group != "so3":
        raise ConfigError("snapshot", f"series needs an so3 snapshot and so3 config (got {state.group}, {cfg.group})")
    scheme = cfg.series["scheme"]
    if scheme == "spectral" and state.grid.n % 2:
        raise ConfigError("series.scheme", "spectral scheme needs an even number of points")
    A = cfg.closure.A
    a = float(np.linalg.norm(A))
    rm1, r0, r1 = riccati_densities(state, cfg.closure, scheme)
    cm1, c0, _ = rho_closed_forms(state, A, scheme)
    H = eval_H_so3(state, A)
    g = state.grid
    ints = [complex(integrate_s(r, g)) for r in (rm1, r0, r1)]
    report = {
        "t": meta.get("t"),
        "pointwise": {
            "rho_m1_vs_closed_form": float(np.abs(rm1 - cm1).max()),
            "rho_0_vs_closed_form": float(np.abs(r0 - c0).max()),
        },
        "integrals": {
            name: {"series": [z.real, z.imag], "H_over_A": h / a, "abs_diff": abs(z - h / a)}
            for name, z, h in zip(("rho_m1", "rho_0", "rho_1"), ints, H)
        },
        "thresholds": {"pointwise": cfg.series["pointwise_tol"], "integral": cfg.series["integral_tol"]},
    }
    ok = report["pointwise"]["rho_m1_vs_closed_form"] <= cfg.series["pointwise_tol"] and all(
        v["abs_diff"] <= cfg.series["integral_tol"] for v in report["integrals"].values()
    )
    report["pass"] = ok
    io.write_json(run.out / "series.json", report)
    with open(run.out / "series.csv", "w") as fh:
        fh.write("s,rho_m1_re,rho_m1_im,rho_0_re,rho_0_im,rho_1_re,rho_1_im\n")
        for j, s in enumerate(g.s):
            vals = [s] + [x for r in (rm1, r0, r1) for x in (r[j].real, r[j].imag)]
            fh.write(",".join(io.fmt(v) for v in vals) + "\n")
    if cfg.plots:
        from . import plotting

        plotting.plot_riccati(g.s, {"rho_-1": rm1, "rho_0": r0, "rho_1": r1}, run.out / "riccati.png")
    run.say(
        ("PASS" if ok else "FAIL")
        + f": rho_-1 pointwise {report['pointwise']['rho_m1_vs_closed_form']:.2e}, "
        + ", ".join(f"{k} integral {v['abs_diff']:.2e}" for k, v in report["integrals"].items())
    )
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides output_dir)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress progress output")
    p = argparse.ArgumentParser(prog="gstrand", description="Simulate and certify G-Strand systems.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "time-step a configured strand and write diagnostics"),
        ("verify", "check constraint rows and zero-curvature residuals"),
        ("series", "Riccati conserved densities of an so3 snapshot"),
        ("ode", "spatially uniform (n = 1) Euler-Poincare run"),
    ):
        sp = sub.add_parser(name, help=helptext, parents=[common])
        sp.add_argument("--config", required=True)
        if name == "verify":
            sp.add_argument("--lambdas", help="comma-separated spectral parameters, e.g. 0.5,1,2,5")
        if name == "series":
            sp.add_argument("--snapshot", required=True)
    return p


def _parse_lambdas(text: str) -> list:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("--lambdas", f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise ConfigError("--lambdas", "expected finite numbers")
    return vals


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = getattr(args, "out", None)
    quiet = getattr(args, "quiet", False)
    try:
        cfg = parse_config(args.config)
        if args.command == "verify" and args.lambdas:
            cfg.lambdas = _parse_lambdas(args.lambdas)
        if args.command == "simulate":
            return run_simulate(cfg, out, quiet)
        if args.command == "verify":
            return run_verify(cfg, out, quiet)
        if args.command == "series":
            return run_series(cfg, args.snapshot, out, quiet)
        return run_ode(cfg, out, quiet)
    except ConfigParseError as e:
        print(f"gstrand: config parse error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, CFLError, GridError, SnapshotError) as e:
        print(f"gstrand: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"gstrand: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
