"""Command line entry point: ``kreinrange classify|curve|verify|render|report``.

Exit codes: 0 success, 1 verification failure, 2 unreadable document,
3 degenerate metric.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

from .document import MatrixDocument, load_document
from .errors import DocumentError, InvalidDimension, InvalidMetric, KreinRangeError
from .pipeline import ShapeReport, classify_matrix, verify_report

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_METRIC = 0, 1, 2, 3
CURVE_COLUMNS = ("component_id", "branch", "sign", "t_or_theta", "x", "y")
REPORT_COLUMNS = ("file", "status", "taxonomy", "rule_fired", "n_components", "n_flats",
                  "min_margin", "min_margin_label", "error")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path) -> MatrixDocument:
    try:
        return load_document(path)
    except InvalidMetric as exc:
        raise CliError(f"degenerate metric: {exc}", EXIT_METRIC) from None
    except (DocumentError, InvalidDimension) as exc:
        raise CliError(f"cannot parse {path}: {exc}", EXIT_PARSE) from None
    except (ValueError, TypeError, KeyError) as exc:
        raise CliError(f"cannot parse {path}: {exc}", EXIT_PARSE) from None


def _classify(doc: MatrixDocument, crosscheck: bool = True) -> ShapeReport:
    try:
        return classify_matrix(doc.matrix, doc.metric, doc.hint, crosscheck=crosscheck)
    except InvalidMetric as exc:
        raise CliError(f"degenerate metric: {exc}", EXIT_METRIC) from None
    except InvalidDimension as exc:
        raise CliError(f"{doc.name}: {exc}", EXIT_PARSE) from None


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def margins(report: ShapeReport) -> tuple[Optional[float], str]:
    """Smallest ``rhs - lhs`` over the certificate's inequalities (positive means it holds)."""
    best, label = None, ""
    for q in report.certificate.inequalities:
        m = float(q.rhs) - float(q.lhs)
        if best is None or m < best:
            best, label = m, q.label
    return best, label


def cmd_classify(args) -> int:
    report = _classify(_load(args.input), not args.no_crosscheck)
    out = report.to_dict()
    _write_text(json.dumps(out, indent=2, sort_keys=True, default=_json_default) + "\n", args.output)
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def cmd_curve(args) -> int:
    if args.samples < 16:
        raise CliError("--samples must be at least 16", EXIT_PARSE)
    report = _classify(_load(args.input), crosscheck=False)
    rows = report.curve.sample(args.samples)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for cid, branch, sign, t, x, y in rows:
        if not (math.isfinite(x) and math.isfinite(y)):
            continue
        w.writerow((cid, branch, sign, _fmt(t), _fmt(x), _fmt(y)))
    _write_text(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1 or args.grid < 32:
        raise CliError("need --trials >= 1 and --grid >= 32", EXIT_PARSE)
    report = _classify(_load(args.input), crosscheck=False)
    checks = verify_report(report, args.trials, args.seed, args.grid, args.perturb_axes)
    print(f"taxonomy={report.taxonomy} rule_fired={report.rule_fired}")
    for note in report.certificate.notes:
        print(f"note: {note}")
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    if not ok:
        worst = max(c.max_support_violation for c in checks)
        print(f"FAIL: max violation {worst:.3e}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_render(args) -> int:
    from .plotting import render_svg

    report = _classify(_load(args.input), crosscheck=False)
    window = tuple(args.window) if args.window else None
    if window and (window[2] <= window[0] or window[3] <= window[1]):
        raise CliError("--window needs x0 < x1 and y0 < y1", EXIT_PARSE)
    render_svg(report, args.output, window)
    return EXIT_OK


def cmd_report(args) -> int:
    from .plotting import render_svg

    src = Path(args.input)
    if not src.is_dir():
        raise CliError(f"{src} is not a directory", EXIT_PARSE)
    out = Path(args.output)
    figures = out.parent / f"{out.stem}_figures"
    rows, sidecar = [], []
    for path in sorted(src.glob("*.json")):
        row = dict.fromkeys(REPORT_COLUMNS, "")
        row["file"] = path.name
        try:
            report = _classify(_load(path))
        except (CliError, KreinRangeError) as exc:
            row.update(status="error", error=str(exc))
            rows.append(row)
            sidecar.append({"file": path.name, "status": "error", "error": str(exc)})
            continue
        m, label = margins(report)
        row.update(status="ok", taxonomy=report.taxonomy, rule_fired=report.rule_fired,
                   n_components=report.curve.component_count,
                   n_flats=len(report.hull.flat_portions) if report.hull is not None else 0,
                   min_margin="" if m is None else f"{m:.6g}", min_margin_label=label)
        figures.mkdir(parents=True, exist_ok=True)
        render_svg(report, figures / f"{path.stem}.svg")
        rows.append(row)
        sidecar.append({"file": path.name, "status": "ok", "report": report.to_dict()})
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    out.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True, default=_json_default) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kreinrange", description="Indefinite numerical ranges of block matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a matrix document and print the report as JSON")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.add_argument("--no-crosscheck", action="store_true", help="skip the pencil support cross-check")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("curve", help="sample the boundary generating curve as CSV")
    c.add_argument("input")
    c.add_argument("--samples", type=int, default=512)
    c.add_argument("--format", choices=("csv",), default="csv")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_curve)

    c = sub.add_parser("verify", help="Monte-Carlo and support-function checks")
    c.add_argument("input")
    c.add_argument("--trials", type=int, default=10000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--grid", type=int, default=256)
    c.add_argument("--perturb-axes", type=float, default=None,
                   help="shrink the hull by this factor before checking (negative control)")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("render", help="draw the curve and hull to SVG")
    c.add_argument("input")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--window", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    c.set_defaults(func=cmd_render)

    c = sub.add_parser("report", help="classify every document in a directory")
    c.add_argument("input")
    c.add_argument("-o", "--output", required=True, help="CSV table; a .json sidecar and figures directory go next to it")
    c.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
