"""CSV and JSON document formats; every write is atomic."""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from ._numbers import fmt_decimal, fmt_exact, q
from .risk import FiniteDistribution, LabeledSample


class InputError(ValueError):
    """Malformed user input; the message names the file and line."""


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path, doc) -> None:
    atomic_write_text(path, dumps(doc))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _label_column(name: str) -> bool:
    return name.strip().lower() in {"label", "y"}


def read_points_csv(path, label_values=None):
    """Read a point file; returns ``(points, labels_or_None)``.

    The header names the coordinates; a final column called ``label`` or
    ``y`` is read as labels, optionally restricted to ``label_values``.
    """
    try:
        fh = open(path, encoding="utf-8", newline="")
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}:1: missing header row") from None
        has_label = bool(header) and _label_column(header[-1])
        width = len(header) - (1 if has_label else 0)
        if width < 1:
            raise InputError(f"{path}:1: header names no coordinate columns")
        points, labels = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, found {len(row)}")
            try:
                points.append(tuple(q(c) for c in row[:width]))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"{path}:{line}: non-numeric coordinate in {row[:width]}") from None
            if has_label:
                try:
                    labels.append(int(row[-1]))
                except ValueError:
                    raise InputError(f"{path}:{line}: label {row[-1]!r} is not an integer") from None
                if label_values is not None and labels[-1] not in label_values:
                    allowed = " or ".join(f"{v:+d}" for v in label_values)
                    raise InputError(f"{path}:{line}: label {labels[-1]} is not {allowed}")
    return points, (labels if has_label else None)


def read_sample_csv(path) -> LabeledSample:
    points, labels = read_points_csv(path, label_values=(-1, 1))
    if labels is None:
        raise InputError(f"{path}:1: sample file needs a final 'label' column")
    return LabeledSample(points, labels)


def sample_csv_text(sample: LabeledSample, d: int | None = None, precision: int | None = None) -> str:

    d = sample.dim if len(sample) else (d or 1)
    header = [f"x{i + 1}" for i in range(d)] + ["label"]

    def fmt(v):
        return fmt_exact(v) if precision is None else fmt_decimal(v, precision)

    rows = [[fmt(c) for c in x] + [str(y)] for x, y in sample]
    return csv_text(header, rows)


def read_distribution(path) -> FiniteDistribution:
    doc = read_json(path)
    try:
        support = [(e["point"], int(e["label"]), Fraction(str(e["probability"]))) for e in doc["support"]]
        return FiniteDistribution(support)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid distribution ({exc})") from None


def distribution_to_dict(dist: FiniteDistribution) -> dict:
    return {
        "support": [
            {"point": [fmt_exact(c) for c in x], "label": y, "probability": fmt_exact(pr)}
            for x, y, pr in dist.support
        ]
    }
