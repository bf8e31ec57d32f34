"""Render error-probability figures from simulator sweep CSVs.

The input contract is the simulator's fixed column set

    kind,estimator,k,snr_db,d_max,trials,errors,p_hat,ci_low,ci_high,seed

with ``kind`` one of ``sim`` (Monte Carlo points), ``bound`` (closed-form
overlay values) and ``fit`` (the fitted decay constant).  Rendering never
transforms the data: plotted series hold exactly the float values parsed
from the CSV, so figures can be audited by reading the points back from
the matplotlib objects.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

EXPECTED_COLUMNS = (
    "kind",
    "estimator",
    "k",
    "snr_db",
    "d_max",
    "trials",
    "errors",
    "p_hat",
    "ci_low",
    "ci_high",
    "seed",
)

_KINDS = ("vs_k", "vs_snr")
_INT_FIELDS = ("k", "d_max", "trials", "errors", "seed")
_FLOAT_FIELDS = ("snr_db", "p_hat", "ci_low", "ci_high")


class CsvFormatError(Exception):
    """Malformed input; the message carries per-row diagnostics."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: which CSV, which view, where to write it."""

    input_csv: str
    kind: str  # "vs_k" | "vs_snr"
    out_path: str
    log_scale: bool = True

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")


def _parse_row(row: dict, line_no: int) -> dict:
    problems = []
    parsed = dict(row)
    if row.get("kind") not in ("sim", "bound", "fit"):
        problems.append(f"bad kind {row.get('kind')!r}")
    if not row.get("estimator"):
        problems.append("missing estimator")
    for field, caster in ((_INT_FIELDS, int), (_FLOAT_FIELDS, float)):
        for name in field:
            text = row.get(name, "")
            if text in ("", None):
                parsed[name] = None
                continue
            try:
                parsed[name] = caster(text)
            except ValueError:
                problems.append(f"{name}={text!r} is not a number")
    if parsed.get("p_hat") is None:
        problems.append("missing p_hat")
    if problems:
        raise CsvFormatError(f"line {line_no}: " + "; ".join(problems))
    return parsed


def load_rows(path: str) -> list[dict]:
    """Parse and validate a sweep CSV; raises CsvFormatError with row
    diagnostics on any defect, including an empty file."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CsvFormatError("empty file: no header row")
        if tuple(reader.fieldnames) != EXPECTED_COLUMNS:
            raise CsvFormatError(
                f"unexpected columns {reader.fieldnames}; need {','.join(EXPECTED_COLUMNS)}"
            )
        rows = []
        problems = []
        for line_no, row in enumerate(reader, start=2):
            if None in row or any(v is None for v in row.values()):
                problems.append(f"line {line_no}: wrong field count")
                continue
            try:
                rows.append(_parse_row(row, line_no))
            except CsvFormatError as exc:
                problems.append(str(exc))
    if problems:
        raise CsvFormatError("; ".join(problems))
    if not rows:
        raise CsvFormatError("no data rows")
    return rows


def _series(rows: list[dict], x_field: str) -> dict[str, tuple[list, list, list, list]]:
    """Per-estimator (x, p_hat, ci_low, ci_high) from sim rows, x-sorted."""
    out: dict[str, tuple[list, list, list, list]] = {}
    for row in rows:
        if row["kind"] != "sim":
            continue
        xs, ps, los, his = out.setdefault(row["estimator"], ([], [], [], []))
        xs.append(row[x_field])
        ps.append(row["p_hat"])
        los.append(row["ci_low"] if row["ci_low"] is not None else row["p_hat"])
        his.append(row["ci_high"] if row["ci_high"] is not None else row["p_hat"])
    for name, (xs, ps, los, his) in out.items():
        order = sorted(range(len(xs)), key=xs.__getitem__)
        out[name] = (
            [xs[i] for i in order],
            [ps[i] for i in order],
            [los[i] for i in order],
            [his[i] for i in order],
        )
    return out


def _bound_series(rows: list[dict], estimator: str, x_field: str) -> tuple[list, list]:
    pairs = sorted(
        (row[x_field], row["p_hat"])
        for row in rows
        if row["kind"] == "bound" and row["estimator"] == estimator
    )
    return [x for x, _ in pairs], [p for _, p in pairs]


def render(spec: FigureSpec):
    """Draw the figure and return (figure, axes) for inspection."""
    rows = load_rows(spec.input_csv)
    x_field = "k" if spec.kind == "vs_k" else "snr_db"
    series = _series(rows, x_field)
    if not series:
        raise CsvFormatError("no sim rows to plot")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for estimator, (xs, ps, los, his) in sorted(series.items()):
        yerr = [
            [p - lo for p, lo in zip(ps, los)],
            [hi - p for p, hi in zip(ps, his)],
        ]
        ax.errorbar(xs, ps, yerr=yerr, marker="o", ms=4, capsize=2, label=estimator)

    if spec.kind == "vs_k":
        fit_rows = [row for row in rows if row["kind"] == "fit"]
        exp_x, exp_vals = _bound_series(rows, "exponent", x_field)
        if fit_rows and exp_vals:
            c_hat = fit_rows[0]["p_hat"]
            exponent = exp_vals[0]
            ks = sorted({x for xs, *_ in series.values() for x in xs})
            fitted = [c_hat * 2.0 ** (-k * exponent) for k in ks]
            ax.plot(ks, fitted, "k--", label=f"{c_hat:.3g} * 2^(-k*{exponent:.3g})")
        else:
            warnings.warn("no fit/exponent rows; dashed fit line omitted")
        ax.set_xlabel("message size k (bits)")
    else:
        xs, uppers = _bound_series(rows, "bound_upper", x_field)
        if xs:
            clamped = [min(u, 1.0) for u in uppers]
            ax.plot(xs, clamped, "g--", label="upper bound (clamped)")
        else:
            warnings.warn("no bound rows; dashed bound line omitted")
        ax.set_xlabel("SNR (dB)")

    if spec.log_scale:
        ax.set_yscale("log")
    ax.set_ylabel("error probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig, ax


def render_to_file(spec: FigureSpec) -> None:
    fig, _ = render(spec)
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from extremum-TDE sweep CSVs"
    )
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--kind", required=True, choices=_KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--linear", action="store_true",
                        help="linear probability axis (default: log)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    spec = FigureSpec(
        input_csv=args.input, kind=args.kind, out_path=args.out,
        log_scale=not args.linear,
    )
    try:
        render_to_file(spec)
    except (CsvFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
