"""Command line interface.

Subcommands: run (simulate + diagnostics), ic (write the initial state),
curves (extract curves from a snapshot), link (link report of a curves
file), helicity (diagnostics row for one snapshot).

Exit codes: 0 success, 2 configuration errors, 3 blow-up, 4 I/O errors.
"""
import sys
from pathlib import Path

from . import vtkio
from .config import ConfigError, apply_overrides, parse_config, render_config, \
    _parse_pairs
from .curves import IsoPair, extract_intersection_curves, extract_isosurface
from .dynamics import BlowUpError, MediumState, equilibrium_state, \
    hopf_initial_condition, pin_boundary, run_simulation
from .grid import ScalarField
from .linking import ProximityError, link_report
from .snapshots import SnapshotError, read_snapshot, write_snapshot
from .topo import NormalizationRanges, helicity_record

TIMESERIES_COLUMNS = (
    "t", "H_coulomb", "flux_total",
    "flux_xm", "flux_xp", "flux_ym", "flux_yp", "flux_zm", "flux_zp",
    "curve_count", "open_curve_count", "total_linkage", "clamp_count",
)


def _g(x):
    return "%g" % x


def _f17(x):
    return "%.17g" % x


def _load_config(args):
    text = ""
    if args.config is not None:
        text = Path(args.config).read_text()
    cfg = parse_config(text)
    if args.override:
        cfg = apply_overrides(cfg, args.override)
    if args.out is not None:
        cfg = apply_overrides(cfg, ["out_dir=%s" % args.out])
    return cfg


def _initial_state(cfg):
    grid = cfg.grid()
    if cfg.ic == "hopf":
        state = hopf_initial_condition(grid, cfg.hopf_params())
    else:
        ustar, vstar = equilibrium_state(cfg.params())
        state = MediumState(ScalarField.full(grid, ustar), ScalarField.full(grid, vstar), 0.0)
    return pin_boundary(state, cfg.boundary())


def _resolve_ranges(cfg, state):
    """Explicit ranges if configured, else the state's own extents widened
    by 10% (see NormalizationRanges.from_state)."""
    explicit = cfg.explicit_ranges()
    if explicit is not None:
        return NormalizationRanges(*explicit)
    return NormalizationRanges.from_state(state)


def _write_snapshot_artifacts(cfg, state, params, bc, ranges, out_dir):
    """Snapshot binary, level surfaces, curves and link reports for one
    state; returns the diagnostics row."""
    t = state.t
    write_snapshot(out_dir / ("snap_t%s.bin" % _g(t)), state, params, bc)
    pairs = cfg.iso_pair_list()
    for level in sorted({p.u_level for p in pairs}):
        mesh = extract_isosurface(state.u, level)
        vtkio.write_mesh(
            out_dir / ("surf_u_%s_t%s.vtk" % (_g(level), _g(t))), mesh,
            title="u=%s t=%s" % (_g(level), _g(t)),
        )
    for level in sorted({p.v_level for p in pairs}):
        mesh = extract_isosurface(state.v, level)
        vtkio.write_mesh(
            out_dir / ("surf_v_%s_t%s.vtk" % (_g(level), _g(t))), mesh,
            title="v=%s t=%s" % (_g(level), _g(t)),
        )
    curve_count = 0
    open_count = 0
    total_linkage = 0
    for pair in pairs:
        curves = extract_intersection_curves(state.u, state.v, pair)
        tag = "%s_%s_t%s" % (_g(pair.u_level), _g(pair.v_level), _g(t))
        vtkio.write_curves(
            out_dir / ("curves_%s.vtk" % tag), curves,
            title="u=%s v=%s t=%s" % (_g(pair.u_level), _g(pair.v_level), _g(t)),
        )
        curve_count += len(curves.closed_curves)
        open_count += curves.open_count
        if curves.defect_count:
            print(
                "warning: t=%s pair (%s, %s): %d chaining defects"
                % (_g(t), _g(pair.u_level), _g(pair.v_level), curves.defect_count),
                file=sys.stderr,
            )
        with open(out_dir / ("links_%s.csv" % tag), "w") as fh:
            fh.write("i,j,link,rounded,residual\n")
            try:
                rep = link_report(curves)
            except ProximityError as e:
                print(
                    "warning: t=%s pair (%s, %s): %s"
                    % (_g(t), _g(pair.u_level), _g(pair.v_level), e),
                    file=sys.stderr,
                )
                fh.write("# proximity guard tripped: %s\n" % e)
                continue
            for i, j, val, rnd, res in rep.pairs:
                fh.write("%d,%d,%s,%d,%s\n" % (i, j, _f17(val), rnd, _f17(res)))
            total_linkage += rep.total_linkage
    rec = helicity_record(state, params, bc, ranges, cfg.p_reg)
    return {
        "t": t,
        "H_coulomb": rec.H,
        "flux_total": rec.flux_total,
        "flux_faces": rec.flux_faces,
        "curve_count": curve_count,
        "open_curve_count": open_count,
        "total_linkage": total_linkage,
        "clamp_count": rec.clamp_count,
    }


def _write_timeseries(path, rows):
    with open(path, "w") as fh:
        fh.write(",".join(TIMESERIES_COLUMNS) + "\n")
        for r in rows:
            cells = [
                _f17(r["t"]), _f17(r["H_coulomb"]), _f17(r["flux_total"]),
            ]
            cells += [_f17(v) for v in r["flux_faces"]]
            cells += [
                "%d" % r["curve_count"], "%d" % r["open_curve_count"],
                "%d" % r["total_linkage"], "%d" % r["clamp_count"],
            ]
            fh.write(",".join(cells) + "\n")


def cmd_run(args):
    cfg = _load_config(args)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config_resolved.txt").write_text(render_config(cfg))
    params = cfg.params()
    bc = cfg.boundary()
    state0 = _initial_state(cfg)
    ranges = _resolve_ranges(cfg, state0)
    rows = [_write_snapshot_artifacts(cfg, state0, params, bc, ranges, out_dir)]

    def on_snapshot(state):
        rows.append(_write_snapshot_artifacts(cfg, state, params, bc, ranges, out_dir))

    result = run_simulation(
        state0, params, bc, cfg.t_end, cfg.snapshot_times,
        dt=cfg.dt, safety=cfg.safety, callback=on_snapshot,
    )
    _write_timeseries(out_dir / "timeseries.csv", rows)
    print(
        "run complete: %d steps to t=%s, %d snapshots, output in %s"
        % (result.steps, _g(result.final.t), len(result.snapshots), out_dir)
    )
    return 0


def cmd_ic(args):
    cfg = _load_config(args)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config_resolved.txt").write_text(render_config(cfg))
    state = _initial_state(cfg)
    path = out_dir / "snap_t0.bin"
    write_snapshot(path, state, cfg.params(), cfg.boundary())
    print("wrote %s" % path)
    return 0


def cmd_curves(args):
    cfg = _load_config(args)
    snap = read_snapshot(args.snapshot)
    pairs = (
        [IsoPair(a, b) for a, b in _parse_pairs(args.pairs)]
        if args.pairs else cfg.iso_pair_list()
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t = snap.state.t
    for pair in pairs:
        curves = extract_intersection_curves(snap.state.u, snap.state.v, pair)
        tag = "%s_%s_t%s" % (_g(pair.u_level), _g(pair.v_level), _g(t))
        vtkio.write_curves(out_dir / ("curves_%s.vtk" % tag), curves)
        try:
            rep = link_report(curves)
            link_desc = "total_linkage=%d max_residual=%.3g" % (
                rep.total_linkage, rep.max_residual,
            )
            with open(out_dir / ("links_%s.csv" % tag), "w") as fh:
                fh.write("i,j,link,rounded,residual\n")
                for i, j, val, rnd, res in rep.pairs:
                    fh.write("%d,%d,%s,%d,%s\n" % (i, j, _f17(val), rnd, _f17(res)))
        except ProximityError as e:
            link_desc = "proximity guard tripped (%s)" % e
        print(
            "pair (%s, %s): %d closed, %d open, %d defects, %s"
            % (
                _g(pair.u_level), _g(pair.v_level), len(curves.closed_curves),
                curves.open_count, curves.defect_count, link_desc,
            )
        )
    return 0


def cmd_link(args):
    curves = vtkio.read_curves(args.curves)
    rep = link_report(curves)
    print("closed=%d open=%d" % (rep.curve_count, rep.open_count))
    print("i,j,link,rounded,residual")
    for i, j, val, rnd, res in rep.pairs:
        print("%d,%d,%s,%d,%s" % (i, j, _f17(val), rnd, _f17(res)))
    print("total_linkage=%d" % rep.total_linkage)
    return 0


def cmd_helicity(args):
    cfg = _load_config(args)
    snap = read_snapshot(args.snapshot)
    explicit = cfg.explicit_ranges()
    if explicit is not None:
        ranges = NormalizationRanges(*explicit)
    else:
        ranges = _resolve_ranges(cfg, snap.state)
    rec = helicity_record(snap.state, snap.params, snap.bc, ranges, cfg.p_reg)
    print(",".join(TIMESERIES_COLUMNS[:9] + ("clamp_count",)))
    cells = [_f17(rec.t), _f17(rec.H), _f17(rec.flux_total)]
    cells += [_f17(v) for v in rec.flux_faces]
    cells.append("%d" % rec.clamp_count)
    print(",".join(cells))
    return 0


def _build_parser():
    import argparse

    p = argparse.ArgumentParser(prog="emtopo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="path to a key = value config file")
        sp.add_argument("--out", help="output directory (overrides out_dir)")
        sp.add_argument(
            "--override", action="append", default=[], metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )

    sp = sub.add_parser("run", help="simulate and write all diagnostics")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("ic", help="write the initial state snapshot")
    common(sp)
    sp.set_defaults(func=cmd_ic)

    sp = sub.add_parser("curves", help="extract intersection curves from a snapshot")
    common(sp)
    sp.add_argument("--snapshot", required=True)
    sp.add_argument("--pairs", help="override level pairs, e.g. '-0.7:-0.1,-0.7:-0.3'")
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("link", help="link report for a curves VTK file")
    sp.add_argument("--curves", required=True)
    sp.set_defaults(func=cmd_link)

    sp = sub.add_parser("helicity", help="helicity and flux row for a snapshot")
    common(sp)
    sp.add_argument("--snapshot", required=True)
    sp.set_defaults(func=cmd_helicity)

    return p


def _inline_dash_values(argv, options=("--pairs",)):
    """Join OPTION VALUE into OPTION=VALUE for values that may begin with a
    dash (negative levels), which argparse would otherwise read as options."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in options and i + 1 < len(argv):
            out.append(a + "=" + argv[i + 1])
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None):
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_inline_dash_values(list(argv)))
    try:
        return args.func(args)
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return 2
    except BlowUpError as e:
        print("blow-up: %s (step %s)" % (e, e.step), file=sys.stderr)
        return 3
    except (SnapshotError, OSError) as e:
        print("i/o error: %s" % e, file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
