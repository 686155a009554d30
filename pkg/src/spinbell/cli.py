"""Command-line front end: ``spinbell {bell,sweep,ingest,quantum,render,bench}``.

Angles accept ``deg`` or ``rad`` suffixes and default to degrees. Any long
option can also be given in a flat ``key = value`` config file passed with
``--config``; command-line flags win.
"""

from __future__ import annotations

import argparse
import functools
import math
import re
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import analysis, dsl, optics, quantum, render, tables
from .core import (
    MeasurementSetting,
    SeparableSpec,
    SpinOrbitState,
    concurrence,
    make_separable,
    normalize,
)

_ANGLE_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(deg|rad)?\s*$")


def angle(text) -> float:
    """'180deg', '3.14159rad' or '45' (degrees) -> radians."""
    if isinstance(text, (int, float)):
        return math.radians(text)
    m = _ANGLE_RE.match(str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    value, unit = float(m.group(1)), m.group(2) or "deg"
    return value if unit == "rad" else math.radians(value)


def complex_list(text) -> list[complex]:
    try:
        return [complex(p.replace(" ", "")) for p in str(text).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def binding(text):
    name, sep, value = str(text).partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=angle, got {text!r}")
    return name.strip(), angle(value)


def read_config(path) -> dict[str, str]:
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key = value")
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def data_file(name: str) -> Path:
    return Path(str(resources.files("spinbell") / "data" / name))


def _resolve(path: str) -> str:
    p = Path(path)
    if p.exists():
        return str(p)
    shipped = data_file(p.name)
    if shipped.exists():
        return str(shipped)
    return str(p)


# ---- shared option groups

def _add_phases(p):
    p.add_argument("--phi", type=angle, default=0.0, help="preparation phase (default deg)")
    p.add_argument("--chi", type=angle, default=0.0, help="MZIM phase (default deg)")


def _add_settings(p):
    p.add_argument("--alpha1", type=angle, default=math.pi / 16)
    p.add_argument("--alpha2", type=angle, default=3 * math.pi / 16)
    p.add_argument("--beta1", type=angle, default=0.0)
    p.add_argument("--beta2", type=angle, default=math.pi / 8)


def _add_mode(p):
    p.add_argument("--mode", choices=("mns", "separable", "bench"), default="mns")
    p.add_argument("--b", type=complex_list, help="separable spec b1,b2,b3,b4")
    p.add_argument("--bench", help=".bench file for --mode bench")


def _settings(args) -> analysis.BellSettings:
    return analysis.BellSettings.from_angles(args.alpha1, args.alpha2, args.beta1, args.beta2)


def _input_state(args) -> SpinOrbitState:
    if args.mode == "separable":
        if not args.b or len(args.b) != 4:
            raise ValueError("--mode separable needs --b b1,b2,b3,b4")
        return make_separable(SeparableSpec(*args.b))
    if args.b is not None:
        raise ValueError("--b only applies to --mode separable")
    return optics.prepare_mns(args.phi)


def _validate_mode(args):
    if args.mode == "bench" and not args.bench:
        raise ValueError("--mode bench needs --bench FILE")
    if args.mode != "bench" and args.bench:
        raise ValueError("--bench only applies to --mode bench")


def _bench_record(ast, args, s: MeasurementSetting, chi=None):
    b = {"alpha": s.alpha, "beta": s.beta, "phi": args.phi, "chi": args.chi if chi is None else chi}
    return dsl.compile_bench(ast, b).run()


def _records(args, settings, chi=None):
    """Detector records for each setting under the selected mode."""
    chi = args.chi if chi is None else chi
    if args.mode == "bench":
        ast = _load_bench(_resolve(args.bench))
        return [_bench_record(ast, args, s, chi) for s in settings]
    state = _input_state(args)
    return [optics.measurement_stage(state, s, chi) for s in settings]


@functools.lru_cache(maxsize=8)
def _load_bench(path):
    return dsl.load(path)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- commands

def cmd_bell(args):
    _validate_mode(args)
    settings = _settings(args)
    res = analysis.BellResult.from_m(*(analysis.correlation_m(r) for r in _records(args, settings)))
    pairs = [("mode", args.mode), ("phi_rad", args.phi), ("chi_rad", args.chi)]
    pairs += tables.bell_pairs(res)
    if args.mode != "mns":
        pairs += [("closed_form_s", "n/a"), ("deviation", "n/a")]
    else:
        cf = analysis.closed_form_s(args.chi, args.phi)
        pairs += [("closed_form_s", cf), ("deviation", res.s - cf)]
    pairs.append(("violates_separable_bound", res.violates))
    _emit(tables.key_values(pairs), args.out)
    if args.plot:
        from .plotting import plot_bell
        ideal = analysis.bell_s(args.phi, args.chi, settings) if args.mode == "mns" else None
        plot_bell(res, args.plot, reference=ideal)
    return 0


SWEEP_DEFAULTS = {"chi": (0.0, 4 * math.pi), "phi": (0.0, 2 * math.pi),
                  "alpha": (0.0, math.pi), "beta": (0.0, math.pi)}


def cmd_sweep(args):
    _validate_mode(args)
    start, stop = SWEEP_DEFAULTS[args.param]
    start = args.start if args.start is not None else start
    stop = args.stop if args.stop is not None else stop
    if args.samples < 2 or stop == start:
        raise ValueError("empty sweep range: need at least 2 samples over a nonzero interval")
    xs = np.linspace(start, stop, args.samples, endpoint=args.endpoint)
    settings = _settings(args)
    base = dict(zip(analysis.BASIS_KEYS, settings))[args.setting]

    rows, intens = [], []
    for x in xs:
        a = argparse.Namespace(**vars(args))
        s = base
        if args.param in ("chi", "phi"):
            setattr(a, args.param, float(x))
        elif args.param == "alpha":
            s = MeasurementSetting(x, base.beta)
        else:
            s = MeasurementSetting(base.alpha, x)
        rec = _records(a, [s])[0]
        m = analysis.correlation_m(rec)
        if args.param in ("chi", "phi"):
            recs = _records(a, settings)
            s_val = tables.fmt(analysis.BellResult.from_m(*map(analysis.correlation_m, recs)).s)
        else:
            s_val = ""
        intens.append(rec.as_tuple())
        rows.append([float(x), *rec.as_tuple(), m, s_val])

    peaks = []
    if args.param == "chi":
        periods = (stop - start) / (2 * math.pi)
        whole = not args.endpoint and abs(periods - round(periods)) < 1e-9
        peaks = analysis.find_peaks([r[2] + r[3] for r in intens], periodic=whole)
        flags = set(int(p) for p in peaks)
        for k, r in enumerate(rows):
            r.append("1" if k in flags else "0")
    else:
        for r in rows:
            r.append("")
    header = [args.param, "i1", "i2", "i3", "i4", "m", "s", "peak"]
    if args.out:
        tables.write_rows(args.out, header, rows)
    else:
        tables.write_rows(sys.stdout, header, rows)
    if args.plot:
        from .plotting import plot_trace
        plot_trace(xs, intens, args.plot, xlabel=f"{args.param} (rad)", peaks=peaks)
    return 0


def cmd_ingest(args):
    rows = tables.read_raw_table(_resolve(args.path))
    res = analysis.analyze_raw_table(rows)
    pairs = [("file", args.path)]
    for (label, *vals), m in zip(sorted(rows, key=lambda r: analysis.basis_key(r[0])), res.m):
        pairs.append((f"m[{analysis.basis_key(label)}]", m))
        pairs.append((f"i_tot[{analysis.basis_key(label)}]", sum(vals)))
    pairs.append(("s", res.s))
    pairs.append(("verdict", "violates separable bound" if res.violates else "within separable bound"))
    _emit(tables.key_values(pairs), args.out)
    if args.plot:
        from .plotting import plot_bell
        plot_bell(res, args.plot, reference=analysis.bell_s(0.0, 0.0))
    return 0


def cmd_quantum(args):
    if args.cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    exp = quantum.coherent_mns(args.amp, args.cutoff)
    pairs = [
        ("amp", str(args.amp)),
        ("cutoff", str(args.cutoff)),
        ("captured_probability", exp.total_probability()),
        ("factorization_deviation", quantum.verify_factorization(args.amp, args.cutoff)),
    ]
    if args.post_select:
        if args.amp == 0:
            raise ValueError("amp = 0 has no single-photon component to post-select")
        ps = quantum.post_select_single_photon(exp)
        pairs += [
            ("single_photon_probability", ps.probability),
            ("expected_probability", abs(args.amp) ** 2 * math.exp(-abs(args.amp) ** 2)),
            ("post_selected_concurrence", quantum.post_selected_concurrence(ps)),
            ("quantum_chsh_s", quantum.quantum_chsh(ps, _settings(args))),
        ]
    _emit(tables.key_values(pairs), args.out)
    if args.csv:
        tables.write_rows(args.csv, *tables.fock_rows(exp))
    if args.plot:
        from .plotting import plot_number_distribution
        plot_number_distribution(exp.number_distribution(), args.plot, mean=abs(args.amp) ** 2)
    return 0


def cmd_render(args):
    if args.state == "mns":
        state = optics.prepare_mns(args.phi)
    elif args.state == "separable":
        if not args.b or len(args.b) != 4:
            raise ValueError("--state separable needs --b b1,b2,b3,b4")
        state = make_separable(SeparableSpec(*args.b))
    else:
        if not args.vector or len(args.vector) != 4:
            raise ValueError("--state vector needs --vector a_vv,a_vh,a_hv,a_hh")
        state = normalize(SpinOrbitState(*args.vector))
    fmap = render.render_field(state, args.grid, args.extent)
    pairs = [
        ("grid", str(args.grid)),
        ("extent", args.extent),
        ("total_power", fmap.total_power()),
        ("concurrence", concurrence(state)),
    ]
    if args.csv:
        render.write_pixels_csv(fmap, args.csv)
    if args.pgm:
        render.write_pgm(fmap, args.pgm)
    if args.plot:
        from .plotting import plot_field
        plot_field(fmap, args.plot)
    _emit(tables.key_values(pairs), args.out)
    return 0


def cmd_bench(args):
    ast = dsl.load(_resolve(args.file))
    if args.print_ast:
        sys.stdout.write(dsl.pretty(ast))
        return 0
    bindings = {"phi": args.phi, "chi": args.chi}
    bindings.update(dict(args.set or []))
    if args.bell:
        settings = _settings(args)
        recs = [dsl.compile_bench(ast, {**bindings, "alpha": s.alpha, "beta": s.beta}).run() for s in settings]
        res = analysis.BellResult.from_m(*map(analysis.correlation_m, recs))
        pairs = tables.bell_pairs(res) + [("violates_separable_bound", res.violates)]
    else:
        rec = dsl.compile_bench(ast, bindings).run()
        pairs = list(zip(("i1", "i2", "i3", "i4"), rec.as_tuple())) + [("m", analysis.correlation_m(rec))]
    _emit(tables.key_values(pairs), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinbell", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key = value file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bell", help="four correlations and S")
    _add_mode(p)
    _add_phases(p)
    _add_settings(p)
    p.add_argument("--out")
    p.add_argument("--plot", help="write a bar chart of the correlations (PNG)")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("sweep", help="CSV trace over chi, phi, alpha or beta")
    _add_mode(p)
    _add_phases(p)
    _add_settings(p)
    p.add_argument("--param", choices=tuple(SWEEP_DEFAULTS), default="chi")
    p.add_argument("--start", type=angle)
    p.add_argument("--stop", type=angle)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--endpoint", action="store_true", help="include the stop value")
    p.add_argument("--setting", choices=analysis.BASIS_KEYS, default="s11")
    p.add_argument("--out")
    p.add_argument("--plot", help="write the trace figure (PNG)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ingest", help="analyze a basis,i1,i2,i3,i4 table")
    p.add_argument("path")
    p.add_argument("--out")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("quantum", help="coherent MNS state, factorization and post-selection")
    p.add_argument("--amp", type=complex, default=1.0)
    p.add_argument("--cutoff", type=int, default=quantum.DEFAULT_CUTOFF)
    p.add_argument("--post-select", action=argparse.BooleanOptionalAction, default=True)
    _add_settings(p)
    p.add_argument("--csv", help="write the Fock coefficient table")
    p.add_argument("--out")
    p.add_argument("--plot", help="photon-number distribution figure (PNG)")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("render", help="transverse field map")
    p.add_argument("--state", choices=("mns", "separable", "vector"), default="mns")
    p.add_argument("--phi", type=angle, default=0.0)
    p.add_argument("--b", type=complex_list)
    p.add_argument("--vector", type=complex_list)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--extent", type=float, default=3.0)
    p.add_argument("--csv", help="pixel dump x,y,intensity,orientation,ellipticity")
    p.add_argument("--pgm", help="grayscale intensity image")
    p.add_argument("--plot", help="intensity + polarization figure (PNG)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="parse and run a .bench program")
    p.add_argument("file")
    p.add_argument("--set", type=binding, action="append", metavar="NAME=ANGLE")
    _add_phases(p)
    _add_settings(p)
    p.add_argument("--bell", action="store_true", help="run the four settings binding alpha and beta")
    p.add_argument("--print-ast", action="store_true", help="pretty-print the parsed program")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            cfg = read_config(args.config)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            known = {a.dest for a in sub._actions}
            unknown = sorted(set(cfg) - known)
            if unknown:
                raise ValueError(f"unknown config key(s): {', '.join(unknown)}")
            for a in sub._actions:
                if a.dest in cfg and isinstance(a.default, bool):
                    cfg[a.dest] = cfg[a.dest].lower() in ("1", "true", "yes", "on")
            sub.set_defaults(**cfg)
            args = parser.parse_args(argv)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"spinbell: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
