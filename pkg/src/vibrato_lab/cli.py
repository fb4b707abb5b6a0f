"""Command-line front end: ``vibrato-lab analyze|batch|fit|model|synth``.

Exit codes: 0 ok, 1 analysis rejected, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .audio_io import AudioFormatError, encode_wav
from .errors import AnalysisRejected, DomainError
from .pipeline import analyze_file
from .stats import group_stats
from .synth import SynthSpec, render, true_measurement
from .vibrato_model import MEASUREMENT_COLUMNS, model_curves

EXIT_OK, EXIT_REJECTED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

RESULT_COLUMNS = MEASUREMENT_COLUMNS + ["status", "reason"]
MANIFEST_COLUMNS = [
    "path",
    "string_freq_hz",
    "center_hint_hz",
    "band_width_cents",
    "start_s",
    "end_s",
    "player",
    "corpus",
]
FIT_COLUMNS = ["group", "degree", "a", "h", "k", "r", "r2", "rho", "p", "n", "c2", "c1", "c0"]
MODEL_COLUMNS = ["x_c", "cents_uncompensated", "cents_compensated"]


class UsageError(Exception):
    pass


def _fmt(value):
    """Deterministic CSV cell: repr for floats, blank for None."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(fh, columns, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _float_or_none(text):
    text = (text or "").strip()
    return float(text) if text else None


# -- analyze ---------------------------------------------------------------


def _result_row(measurement=None, status="ok", reason="", **meta):
    row = dict.fromkeys(MEASUREMENT_COLUMNS)
    row.update(meta)
    if measurement is not None:
        row.update(measurement.as_row())
    row["status"] = status
    row["reason"] = reason
    return row


def _run_one(path, string_freq, center_hint, width, start_s, end_s, player, corpus,
             file_label=None):
    return analyze_file(
        path,
        string_freq,
        center_hint,
        width,
        start_s=start_s,
        end_s=end_s,
        file=file_label if file_label is not None else str(path),
        player=player,
        corpus=corpus,
    )


def cmd_analyze(args):
    try:
        result = _run_one(args.file, args.string_freq, args.center_hint, args.band_width_cents,
                          args.start, args.end, args.player, args.corpus)
    except AnalysisRejected as exc:
        print(json.dumps({"status": "rejected", "reason": exc.reason, "detail": str(exc)}))
        return EXIT_REJECTED
    except DomainError as exc:
        print(json.dumps({"status": "rejected", "reason": "domain", "detail": str(exc)}))
        return EXIT_REJECTED

    if args.dump_track:
        result.track.to_csv(args.dump_track)
    if args.dump_cycles:
        result.cycles.to_csv(args.dump_cycles)

    row = _result_row(result.measurement)
    if args.format == "csv":
        _write_csv(sys.stdout, RESULT_COLUMNS, [row])
    else:
        print(json.dumps({c: row[c] for c in RESULT_COLUMNS}))
    return EXIT_OK


# -- batch -----------------------------------------------------------------


def read_manifest(path):
    """Rows of a manifest CSV as dicts with typed fields."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = {"path", "string_freq_hz", "center_hint_hz"} - set(reader.fieldnames)
        if missing:
            raise UsageError(f"manifest lacks required columns: {sorted(missing)}")
        rows = []
        for raw in reader:
            rows.append(
                {
                    "path": raw["path"],
                    "string_freq_hz": float(raw["string_freq_hz"]),
                    "center_hint_hz": float(raw["center_hint_hz"]),
                    "band_width_cents": _float_or_none(raw.get("band_width_cents")) or 200.0,
                    "start_s": _float_or_none(raw.get("start_s")),
                    "end_s": _float_or_none(raw.get("end_s")),
                    "player": (raw.get("player") or "").strip(),
                    "corpus": (raw.get("corpus") or "").strip(),
                }
            )
        return rows


def _batch_row(base_dir, entry):
    meta = {"file": entry["path"], "player": entry["player"], "corpus": entry["corpus"]}
    path = Path(entry["path"])
    if not path.is_absolute():
        path = base_dir / path
    try:
        result = _run_one(path, entry["string_freq_hz"], entry["center_hint_hz"],
                          entry["band_width_cents"], entry["start_s"], entry["end_s"],
                          entry["player"], entry["corpus"], file_label=entry["path"])
    except AnalysisRejected as exc:
        return _result_row(status="rejected", reason=exc.reason, **meta)
    except DomainError as exc:
        return _result_row(status="rejected", reason=f"domain: {exc}", **meta)
    except (OSError, AudioFormatError) as exc:
        return _result_row(status="error", reason=f"{type(exc).__name__}: {exc}", **meta)
    return _result_row(result.measurement)


def _thread_count():
    env = os.environ.get("VIBRATO_LAB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def cmd_batch(args):
    manifest = Path(args.manifest)
    try:
        entries = read_manifest(manifest)
    except OSError as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: malformed manifest: {exc}", file=sys.stderr)
        return EXIT_IO
    if not entries:
        print("warning: empty manifest", file=sys.stderr)

    base_dir = manifest.resolve().parent
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        # map() yields in submission order
        rows = list(pool.map(lambda e: _batch_row(base_dir, e), entries))

    try:
        fh, close = _open_out(args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _write_csv(fh, RESULT_COLUMNS, rows)
    finally:
        if close:
            fh.close()

    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        print(f"warning: {failed} of {len(rows)} rows not measured", file=sys.stderr)
    return EXIT_OK


# -- fit -------------------------------------------------------------------


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _fit_record(name, summary, degree):
    fit, sp = summary.fit, summary.spearman
    rec = {"group": name, "degree": degree, "n": summary.n}
    if fit is not None:
        rec["r2"] = fit.r_squared
        rec["r"] = fit.pearson_r
        coeffs = list(fit.coefficients)
        rec["c2"], rec["c1"], rec["c0"] = ([0.0] * (3 - len(coeffs))) + coeffs
        if fit.vertex_form is not None:
            rec["a"], rec["h"], rec["k"] = fit.vertex_form
    if sp is not None:
        rec["rho"], rec["p"] = sp.rho, sp.p_value
    return rec


def cmd_fit(args):
    try:
        table = _read_table(args.results)
    except OSError as exc:
        print(f"error: cannot read {args.results}: {exc}", file=sys.stderr)
        return EXIT_IO
    if "status" in (table[0] if table else {}):
        table = [r for r in table if r["status"] == "ok"]
    for col in [args.x, args.y] + ([args.group] if args.group else []):
        if table and col not in table[0]:
            raise UsageError(f"column {col!r} not in {args.results}")
    # blank cells mean "not measured"; anything else must parse as a number
    table = [r for r in table if r[args.x].strip() and r[args.y].strip()]
    for r in table:
        for col in (args.x, args.y):
            try:
                float(r[col])
            except ValueError:
                raise UsageError(f"non-numeric {col!r} value {r[col]!r}")

    with warnings.catch_warnings():
        # undersized groups are reported below and in the JSON payload
        warnings.simplefilter("ignore")
        summaries = [("combined", s) for s in group_stats(table, None, args.x, args.y,
                                                          args.degree)]
        if args.group:
            summaries = [(s.group, s) for s in group_stats(table, args.group, args.x, args.y,
                                                           args.degree)] + summaries
    records = [_fit_record(name, s, args.degree) for name, s in summaries]
    skipped = [w for _, s in summaries for w in s.warnings]
    for w in skipped:
        print(f"warning: {w}", file=sys.stderr)

    fh, close = _open_out(args.out)
    try:
        if args.format == "csv":
            _write_csv(fh, FIT_COLUMNS, records)
        else:
            payload = {
                "x": args.x,
                "y": args.y,
                "fits": [
                    {
                        "group": name,
                        "regression": s.fit.as_dict() if s.fit else None,
                        "spearman": s.spearman.as_dict() if s.spearman else None,
                        "n": s.n,
                    }
                    for name, s in summaries
                ],
                "warnings": skipped,
            }
            fh.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


# -- model -----------------------------------------------------------------


def cmd_model(args):
    try:
        a, h, k = (float(v) for v in args.quad_D.split(","))
    except ValueError:
        raise UsageError("--quad-D expects three comma-separated numbers a,h,k")
    if args.steps < 2 or not args.x_min < args.x_max:
        raise UsageError("need --steps >= 2 and --x-min < --x-max")
    grid = np.linspace(args.x_min, args.x_max, args.steps)
    try:
        curves = model_curves(args.f_string, grid, args.const_D, (a, h, k))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    rows = [
        {"x_c": x, "cents_uncompensated": u, "cents_compensated": c}
        for x, u, c in zip(curves.x_c, curves.uncompensated, curves.compensated)
    ]
    fh, close = _open_out(args.out)
    report = sys.stdout if close else sys.stderr
    try:
        _write_csv(fh, MODEL_COLUMNS, rows)
    finally:
        if close:
            fh.close()
    if curves.crossing is None:
        print("no crossing", file=report)
    else:
        print(f"crossing x_c={curves.crossing:.6f} cents={curves.crossing_cents():.4f}",
              file=report)
    return EXIT_OK


# -- synth -----------------------------------------------------------------


def cmd_synth(args):
    spec = SynthSpec(
        f_center=args.f_center,
        depth_cents=args.depth_cents,
        rate_hz=args.rate,
        duration_s=args.duration,
        sample_rate=args.sample_rate,
        n_harmonics=args.harmonics,
        drift_hz_per_s=args.drift,
        noise_rms=args.noise,
        seed=args.seed,
    )
    try:
        spec.validate()
    except DomainError as exc:
        raise UsageError(str(exc))
    try:
        encode_wav(args.out, render(spec))
        if args.emit_truth:
            truth = {"spec": json.loads(spec.to_json())}
            if args.string_freq is not None:
                truth["measurement"] = true_measurement(spec, args.string_freq).as_dict()
            with open(args.emit_truth, "w", encoding="utf-8") as fh:
                json.dump(truth, fh, indent=2, sort_keys=True)
                fh.write("\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="vibrato-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="measure the vibrato of one WAV excerpt")
    a.add_argument("file")
    a.add_argument("--string-freq", type=float, required=True, help="open-string frequency (Hz)")
    a.add_argument("--center-hint", type=float, required=True, help="intended note (Hz)")
    a.add_argument("--band-width-cents", type=float, default=200.0)
    a.add_argument("--start", type=float, default=None, help="trim start (s)")
    a.add_argument("--end", type=float, default=None, help="trim end (s)")
    a.add_argument("--player", default="")
    a.add_argument("--corpus", default="")
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--dump-track", metavar="CSV")
    a.add_argument("--dump-cycles", metavar="CSV")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("batch", help="analyze every row of a manifest CSV")
    b.add_argument("manifest")
    b.add_argument("out", nargs="?", default="-")
    b.set_defaults(func=cmd_batch)

    f = sub.add_parser("fit", help="polynomial fits and Spearman tests over a results table")
    f.add_argument("results")
    f.add_argument("--x", required=True)
    f.add_argument("--y", required=True)
    f.add_argument("--degree", type=int, choices=[1, 2], default=2)
    f.add_argument("--group")
    f.add_argument("--format", choices=["json", "csv"], default="json")
    f.add_argument("--out", default="-")
    f.set_defaults(func=cmd_fit)

    m = sub.add_parser("model", help="cents depth vs centre with and without compensation")
    m.add_argument("--f-string", type=float, default=220.0)
    m.add_argument("--const-D", type=float, default=0.00497)
    m.add_argument("--quad-D", default="-0.0079,0.054,0.0066", help="a,h,k of a(x-h)^2+k")
    m.add_argument("--x-min", type=float, default=0.0)
    m.add_argument("--x-max", type=float, default=0.9)
    m.add_argument("--steps", type=int, default=91)
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_model)

    s = sub.add_parser("synth", help="render a synthetic vibrato WAV fixture")
    s.add_argument("--out", required=True)
    s.add_argument("--f-center", type=float, default=440.0)
    s.add_argument("--depth-cents", type=float, default=20.0)
    s.add_argument("--rate", type=float, default=6.0)
    s.add_argument("--duration", type=float, default=2.0)
    s.add_argument("--sample-rate", type=int, default=44100)
    s.add_argument("--harmonics", type=int, default=3)
    s.add_argument("--drift", type=float, default=0.0, help="centre drift (Hz/s)")
    s.add_argument("--noise", type=float, default=0.0, help="noise RMS relative to signal")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--string-freq", type=float, default=220.0,
                   help="open string used for the ground-truth measurement")
    s.add_argument("--emit-truth", metavar="JSON")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except AudioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
