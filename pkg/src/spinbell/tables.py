"""Delimited text in and out: raw detector tables, traces, Fock tables, reports."""

from __future__ import annotations

import csv
import io

RAW_HEADER = ("basis", "i1", "i2", "i3", "i4")


class TableError(ValueError):
    pass


def fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # no "-0"
    return f"{x:.12g}"


def _number(text: str, lineno: int, col: str) -> float:
    t = text.strip()
    if "," in t and "." not in t:
        t = t.replace(",", ".")
    try:
        return float(t)
    except ValueError:
        raise TableError(f"line {lineno}: column {col!r}: not a number: {text!r}") from None


def _delimiter(header: str) -> str:
    for d in (";", "\t"):
        if d in header:
            return d
    return ","


def parse_raw_table(text: str):
    """Parse ``basis,i1,i2,i3,i4`` rows.

    Decimal commas ("7,99") are accepted when the delimiter is ``;`` or tab, or
    when the field is quoted.
    """
    lines = text.splitlines()
    numbered = [(n, ln) for n, ln in enumerate(lines, 1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not numbered:
        raise TableError("empty table")
    delim = _delimiter(numbered[0][1])
    reader = csv.reader(io.StringIO("\n".join(ln for _, ln in numbered)), delimiter=delim)
    rows = list(reader)
    header = [h.strip().lower() for h in rows[0]]
    if tuple(header) != RAW_HEADER:
        raise TableError(f"line {numbered[0][0]}: expected header {','.join(RAW_HEADER)}, got {','.join(header)}")
    out = []
    for (lineno, _), row in zip(numbered[1:], rows[1:]):
        if len(row) != 5:
            raise TableError(f"line {lineno}: expected 5 fields, got {len(row)}")
        vals = [_number(v, lineno, c) for v, c in zip(row[1:], RAW_HEADER[1:])]
        if any(v < 0 for v in vals):
            raise TableError(f"line {lineno}: negative intensity")
        if sum(vals) <= 0:
            raise TableError(f"line {lineno}: non-positive total intensity")
        out.append((row[0].strip(), *vals))
    return out


def read_raw_table(path):
    with open(path, encoding="utf-8") as fh:
        return parse_raw_table(fh.read())


def write_rows(path_or_file, header, rows):
    """Write CSV with fixed float formatting; ``path_or_file`` may be a path or a text stream."""
    if hasattr(path_or_file, "write"):
        _write(path_or_file, header, rows)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh, header, rows)


def _write(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])


def trace_rows(trace, name="chi"):
    return [name, "i1", "i2", "i3", "i4"], [(c, *rec.as_tuple()) for c, rec in trace]


def fock_rows(exp):
    rows = [(str(q), str(m), c.real, c.imag, abs(c) ** 2) for q, m, c in exp.rows()]
    return ["n_vv", "n_hh", "re", "im", "prob"], rows


def key_values(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    lines = []
    for k, v in pairs:
        if isinstance(v, bool):
            v = "yes" if v else "no"
        elif isinstance(v, float):
            v = fmt(v)
        lines.append(f"{k.ljust(width)} = {v}")
    return "\n".join(lines) + "\n"


def bell_pairs(result, prefix=""):
    return [
        (prefix + "m11", result.m11),
        (prefix + "m12", result.m12),
        (prefix + "m21", result.m21),
        (prefix + "m22", result.m22),
        (prefix + "s", result.s),
    ]
