"""Command-line front end.

    poissonrep <sample|cohomology|bracket|jacobi|rank-scan|kummer|mcg|flow>
               --config file.json [--seed N] [--out dir] [--jobs N]

Exit codes: 0 success, 1 invalid configuration (message names the offending
field), 2 sampling failure or numerical-guard violation.  Reports embed the
tool version and the full configuration; identical configuration and seed
produce byte-identical report bodies (no timestamps are written).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bracket import ambient_bracket, as_split, jacobi_residual, poisson_bracket
from .config import ConfigError, RunConfig, config_from_dict, load_config
from .flows import StratumBoundaryError, integrate_flow, trajectory_rows
from .functions import parse_function
from .homology import build_complex
from .persist import Envelope, load_representations, save_envelope, save_representations
from .repspace import SamplingError, sample_representation
from .scans import (MappingClass, dehn_twist, kummer_census, poisson_rank,
                    probe_family, random_word, scan_csv_rows)
from .fox import Word, parse_word, word_str


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in fieldnames])


def _resolve(args) -> tuple[RunConfig, dict]:
    cfg = load_config(args.config)
    seed = cfg.effective_seed(args.seed)
    out = Path(args.out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs or cfg.jobs or os.cpu_count() or 1
    ctx = {"seed": seed, "out": out, "jobs": jobs,
           "echo": {**cfg.echo(), "effective_seed": seed}}
    return cfg, ctx


def _parallel_map(worker, arglist, jobs: int):
    if jobs <= 1 or len(arglist) <= 1:
        return [worker(a) for a in arglist]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, arglist))


# -- per-record workers (module level so they pickle) ---------------------------

def _sample_worker(packed):
    raw, seed = packed
    cfg = config_from_dict(raw)
    group = cfg.build_group()
    rep = sample_representation(group, cfg.genus, cfg.central, seed)
    from .persist import representation_to_json
    return representation_to_json(rep), rep.relator_residual()


def _rank_worker(packed):
    raw, seed = packed
    cfg = config_from_dict(raw)
    group = cfg.build_group()
    form = cfg.build_form(group)
    rep = sample_representation(group, cfg.genus, cfg.central, seed)
    family = probe_family(group, cfg.genus, cfg.effective_seed(None))
    rec = poisson_rank(rep, form, family, seed=seed)
    return {"seed": rec.seed, "orbit_type": rec.orbit_label, "h0": rec.h0,
            "h1": rec.h1, "rank": rec.rank, "sv_gap": rec.sv_gap,
            "spectrum": list(rec.spectrum)}


def _cohomology_worker(packed):
    raw, seed = packed
    cfg = config_from_dict(raw)
    group = cfg.build_group()
    rep = sample_representation(group, cfg.genus, cfg.central, seed)
    data = build_complex(rep)
    h0, h1, h2 = data.dims
    return {"seed": seed, "h0": h0, "h1": h1, "h2": h2,
            "complex_defect": data.complex_defect(),
            "svals_1": ";".join(repr(float(s)) for s in data.svals_1),
            "svals_2": ";".join(repr(float(s)) for s in data.svals_2)}


# -- commands --------------------------------------------------------------------

def cmd_sample(cfg: RunConfig, ctx) -> int:
    count = int(cfg.params.get("count", 10))
    packed = [(cfg.raw, ctx["seed"] + k) for k in range(count)]
    try:
        results = _parallel_map(_sample_worker, packed, ctx["jobs"])
    except SamplingError as err:
        print(f"sampling failed: {err}", file=sys.stderr)
        return 2
    payload = {
        "count": count,
        "representations": [r for r, _ in results],
        "relator_residuals": [res for _, res in results],
    }
    save_envelope(ctx["out"] / "samples.json",
                  Envelope(kind="representations", payload=payload, config=ctx["echo"]))
    print(f"wrote {count} representations; max residual "
          f"{max(res for _, res in results):.3e}")
    return 0


def _input_reps(cfg: RunConfig, ctx, default_count=10):
    path = cfg.params.get("representations")
    if path:
        reps = load_representations(path)
        return list(enumerate(reps))
    group = cfg.build_group()
    count = int(cfg.params.get("count", default_count))
    out = []
    for k in range(count):
        seed = ctx["seed"] + k
        out.append((seed, sample_representation(group, cfg.genus, cfg.central, seed)))
    return out


def cmd_cohomology(cfg: RunConfig, ctx) -> int:
    if cfg.params.get("representations"):
        rows = []
        for seed, rep in _input_reps(cfg, ctx):
            data = build_complex(rep)
            h0, h1, h2 = data.dims
            rows.append({"seed": seed, "h0": h0, "h1": h1, "h2": h2,
                         "complex_defect": data.complex_defect(),
                         "svals_1": ";".join(repr(float(s)) for s in data.svals_1),
                         "svals_2": ";".join(repr(float(s)) for s in data.svals_2)})
    else:
        count = int(cfg.params.get("count", 10))
        packed = [(cfg.raw, ctx["seed"] + k) for k in range(count)]
        rows = _parallel_map(_cohomology_worker, packed, ctx["jobs"])
    rows.sort(key=lambda r: r["seed"])
    write_csv(ctx["out"] / "cohomology.csv",
              ["seed", "h0", "h1", "h2", "complex_defect", "svals_1", "svals_2"], rows)
    save_envelope(ctx["out"] / "cohomology.json",
                  Envelope(kind="cohomology_report", payload={"records": rows},
                           config=ctx["echo"]))
    print(f"wrote {len(rows)} cohomology records")
    return 0


def cmd_bracket(cfg: RunConfig, ctx) -> int:
    group = cfg.build_group()
    form = cfg.build_form(group)
    split = as_split(form)
    f = parse_function(cfg.params.get("f", "tr(x1)"))
    h = parse_function(cfg.params.get("h", "tr(y1)"))
    rows = []
    for seed, rep in _input_reps(cfg, ctx):
        bv = poisson_bracket(f, h, rep, split)
        amb = ambient_bracket(f, h, rep, split)
        rows.append({"seed": seed, "value": bv.value, "ambient": amb,
                     "route_difference": abs(bv.value - amb),
                     "cycle_defect_f": bv.cycle_defect_f,
                     "cycle_defect_h": bv.cycle_defect_h})
    write_csv(ctx["out"] / "bracket.csv",
              ["seed", "value", "ambient", "route_difference",
               "cycle_defect_f", "cycle_defect_h"], rows)
    save_envelope(ctx["out"] / "bracket.json",
                  Envelope(kind="bracket_report", payload={"records": rows},
                           config=ctx["echo"]))
    print(f"wrote {len(rows)} bracket records")
    return 0


def cmd_jacobi(cfg: RunConfig, ctx) -> int:
    group = cfg.build_group()
    form = cfg.build_form(group)
    split = as_split(form)
    n_triples = int(cfg.params.get("triples", 3))
    n_points = int(cfg.params.get("points", 2))
    guard = float(cfg.params.get("guard", 1e-4))
    rng = np.random.default_rng(ctx["seed"])
    funcs = []
    if "functions" in cfg.params:
        words = [parse_word(w) for w in cfg.params["functions"]]
    else:
        words = [random_word(rng, 2 * cfg.genus, 4) for _ in range(3 * n_triples)]
    rows, violations = [], 0
    for p in range(n_points):
        seed = ctx["seed"] + 37 * p
        rep = sample_representation(group, cfg.genus, cfg.central, seed)
        for t in range(n_triples):
            triple = words[3 * t:3 * t + 3]
            if len(triple) < 3:
                break
            from .functions import TraceWord
            f, h, k = (TraceWord(w) for w in triple)
            res = jacobi_residual(f, h, k, rep, split)
            bad = res > guard
            violations += bad
            rows.append({"seed": seed, "point": p, "triple": t,
                         "f": word_str(triple[0]), "h": word_str(triple[1]),
                         "k": word_str(triple[2]), "residual": res,
                         "guard_violated": int(bad)})
    write_csv(ctx["out"] / "jacobi.csv",
              ["seed", "point", "triple", "f", "h", "k", "residual",
               "guard_violated"], rows)
    save_envelope(ctx["out"] / "jacobi.json",
                  Envelope(kind="jacobi_report", payload={"records": rows},
                           config=ctx["echo"]))
    print(f"wrote {len(rows)} jacobi records; {violations} guard violations")
    return 2 if violations else 0


def cmd_rank_scan(cfg: RunConfig, ctx) -> int:
    count = int(cfg.params.get("count", 20))
    packed = [(cfg.raw, ctx["seed"] + k) for k in range(count)]
    try:
        recs = _parallel_map(_rank_worker, packed, ctx["jobs"])
    except SamplingError as err:
        print(f"sampling failed: {err}", file=sys.stderr)
        return 2
    recs.sort(key=lambda r: r["seed"])
    csv_rows = [{k: r[k] for k in
                 ("seed", "orbit_type", "h0", "h1", "rank", "sv_gap")} for r in recs]
    write_csv(ctx["out"] / "rank_scan.csv",
              ["seed", "orbit_type", "h0", "h1", "rank", "sv_gap"], csv_rows)
    save_envelope(ctx["out"] / "rank_scan.json",
                  Envelope(kind="rank_scan_report", payload={"records": recs},
                           config=ctx["echo"]))
    print(f"wrote {count} rank records")
    return 0


def cmd_kummer(cfg: RunConfig, ctx) -> int:
    group = cfg.build_group()
    if group.name != "SU2" or cfg.genus != 2:
        raise ConfigError("group", "the census experiment needs SU2 at genus 2")
    report = kummer_census(group, ctx["seed"],
                           n_abelian=int(cfg.params.get("abelian", 50)),
                           n_irreducible=int(cfg.params.get("irreducible", 50)))
    all_rows = scan_csv_rows(report.central + report.abelian + report.irreducible)
    write_csv(ctx["out"] / "kummer.csv",
              ["seed", "orbit_type", "h0", "h1", "rank", "sv_gap",
               "relator_residual"], all_rows)
    payload = {
        "rank_pattern": report.rank_pattern(),
        "central_count": len(report.central),
        "abelian_count": len(report.abelian),
        "irreducible_count": len(report.irreducible),
        "violations": report.violations,
        "spectra": {
            "central": [list(r.spectrum) for r in report.central],
            "abelian": [list(r.spectrum) for r in report.abelian],
            "irreducible": [list(r.spectrum) for r in report.irreducible],
        },
    }
    save_envelope(ctx["out"] / "kummer.json",
                  Envelope(kind="kummer_report", payload=payload, config=ctx["echo"]))
    print(f"rank pattern: {report.rank_pattern()}; "
          f"{len(report.violations)} violations")
    return 2 if report.violations else 0


def _twist_from_params(cfg: RunConfig) -> MappingClass:
    spec = cfg.params.get("twist", {"on": "y", "pair": 1, "inverse": False})
    if "images" in spec:
        n = 2 * cfg.genus
        images = [parse_word(spec["images"].get(_gen_name(i), _gen_name(i)))
                  for i in range(n)]
        return MappingClass(spec.get("name", "custom"), tuple(images))
    return dehn_twist(cfg.genus, pair=int(spec.get("pair", 1)) - 1,
                      inverse=bool(spec.get("inverse", False)),
                      on=spec.get("on", "y"))


def _gen_name(i: int) -> str:
    from .fox import generator_name
    return generator_name(i)


def cmd_mcg(cfg: RunConfig, ctx) -> int:
    from .scans import mcg_pullback_check
    group = cfg.build_group()
    form = cfg.build_form(group)
    beta = _twist_from_params(cfg)
    f = parse_function(cfg.params.get("f", "tr(x1)"))
    h = parse_function(cfg.params.get("h", "tr(y1)"))
    guard = float(cfg.params.get("guard", 1e-8))
    count = int(cfg.params.get("count", 10))
    rows, violations = [], 0
    for k in range(count):
        seed = ctx["seed"] + k
        rep = sample_representation(group, cfg.genus, cfg.central, seed)
        res = mcg_pullback_check(beta, f, h, rep, form)
        bad = res > guard
        violations += bad
        rows.append({"seed": seed, "twist": beta.name, "residual": res,
                     "guard_violated": int(bad)})
    write_csv(ctx["out"] / "mcg.csv",
              ["seed", "twist", "residual", "guard_violated"], rows)
    save_envelope(ctx["out"] / "mcg.json",
                  Envelope(kind="mcg_report", payload={"records": rows},
                           config=ctx["echo"]))
    print(f"wrote {len(rows)} equivariance records; {violations} guard violations")
    return 2 if violations else 0


def cmd_flow(cfg: RunConfig, ctx) -> int:
    group = cfg.build_group()
    form = cfg.build_form(group)
    f = parse_function(cfg.params.get("f", "tr(x1)"))
    t_end = float(cfg.params.get("t_end", 1.0))
    dt = float(cfg.params.get("dt", 1e-3))
    rep = sample_representation(group, cfg.genus, cfg.central, ctx["seed"])
    try:
        traj = integrate_flow(f, rep, t_end, dt, form,
                              record_every=int(cfg.params.get("record_every", 1)))
    except (StratumBoundaryError, SamplingError) as err:
        print(f"flow aborted: {err}", file=sys.stderr)
        return 2
    rows = trajectory_rows(traj)
    write_csv(ctx["out"] / "flow.csv",
              ["time", "f_value", "relator_residual", "h0"], rows)
    save_envelope(ctx["out"] / "flow.json",
                  Envelope(kind="flow_report",
                           payload={"records": rows,
                                    "f_drift": traj.f_drift(),
                                    "max_relator_residual": traj.max_relator_residual()},
                           config=ctx["echo"]))
    print(f"flow of {cfg.params.get('f', 'tr(x1)')} for t={t_end}: "
          f"drift {traj.f_drift():.3e}")
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "cohomology": cmd_cohomology,
    "bracket": cmd_bracket,
    "jacobi": cmd_jacobi,
    "rank-scan": cmd_rank_scan,
    "kummer": cmd_kummer,
    "mcg": cmd_mcg,
    "flow": cmd_flow,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="poissonrep",
        description="Poisson structures on surface-group representation spaces")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None,
                       help="overrides POISSON_SEED and the config seed")
        p.add_argument("--out", default=None)
        p.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg, ctx = _resolve(args)
        return COMMANDS[args.command](cfg, ctx)
    except ConfigError as err:
        print(str(err), file=sys.stderr)
        return 1
    except (SamplingError, StratumBoundaryError) as err:
        print(str(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
