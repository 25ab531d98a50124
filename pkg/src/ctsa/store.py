"""CSV ingestion and on-disk persistence of the series catalog.

A store is a directory holding two line-delimited JSON files:

``catalog.jsonl``
    a meta record ``{"format_version": 1}`` followed by one record per
    compressed segment.
``raw.jsonl``
    one record per raw series, kept for exact (oracle) evaluation.

Floats are written in their shortest round-trip form, so loading
reproduces every stored number bit for bit.
"""
from __future__ import annotations

import csv
import json
import math
import os
from collections import defaultdict
from pathlib import Path

import numpy as np

from .compress import CompressedSeries, SegmentRep
from .core import Domain, ErrorMeasures, TimeSeries
from .errors import (
    CsvParseError,
    EvaluationError,
    IngestError,
    MissingRawError,
    StoreError,
    UnknownSeriesError,
)
from .families import FittedFunction, get_family

FORMAT_VERSION = 1
CATALOG_FILE = "catalog.jsonl"
RAW_FILE = "raw.jsonl"
CSV_HEADER = ["series_id", "t", "value"]


class Catalog:
    """Compressed series by id, plus optional raw series for oracle mode."""

    def __init__(self, compressed=None, raw=None):
        self.compressed: dict[str, CompressedSeries] = dict(compressed or {})
        self.raw: dict[str, TimeSeries] = dict(raw or {})

    def add_compressed(self, series: CompressedSeries):
        self.compressed[series.series_id] = series

    def add_raw(self, series_id: str, t: TimeSeries):
        self.raw[series_id] = t

    def get_compressed(self, name: str) -> CompressedSeries:
        try:
            return self.compressed[name]
        except KeyError:
            if name in self.raw:
                raise EvaluationError(f"series {name!r} has not been compressed") from None
            raise UnknownSeriesError(f"unknown series {name!r}") from None

    def get_raw(self, name: str) -> TimeSeries:
        try:
            return self.raw[name]
        except KeyError:
            if name in self.compressed:
                raise MissingRawError(f"no raw data stored for series {name!r}") from None
            raise UnknownSeriesError(f"unknown series {name!r}") from None

    def series_ids(self) -> list[str]:
        return sorted(set(self.compressed) | set(self.raw))

    def __len__(self):
        return len(self.series_ids())

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        if set(self.compressed) != set(other.compressed) or self.raw != other.raw:
            return False
        return all(
            _records(self.compressed[k]) == _records(other.compressed[k]) for k in self.compressed
        )


# ---------------------------------------------------------------------------
# CSV


def ingest_csv(path) -> list[TimeSeries]:
    """Read ``series_id,t,value`` rows into one series per id.

    Rows may interleave series and appear in any order; within a series the
    positions must form a gap-free run of integers.
    """
    rows = defaultdict(list)
    order = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{path}: empty file")
        if [h.strip() for h in header] != CSV_HEADER:
            raise CsvParseError(f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}", 1)
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise CsvParseError(f"expected 3 fields, got {len(row)}", line)
            sid, t_txt, v_txt = (c.strip() for c in row)
            if not sid:
                raise CsvParseError("empty series_id", line)
            try:
                t = int(t_txt)
            except ValueError:
                raise CsvParseError(f"position {t_txt!r} is not an integer", line) from None
            try:
                v = float(v_txt)
            except ValueError:
                raise CsvParseError(f"value {v_txt!r} is not numeric", line) from None
            if not math.isfinite(v):
                raise CsvParseError(f"value {v_txt!r} is not finite", line)
            if sid not in rows:
                order.append(sid)
            rows[sid].append((t, v, line))
    out = []
    for sid in order:
        pts = sorted(rows[sid], key=lambda r: (r[0], r[2]))
        for prev, cur in zip(pts, pts[1:]):
            if cur[0] == prev[0]:
                raise IngestError(f"series {sid!r}: duplicate t={cur[0]} (line {cur[2]})")
            if cur[0] != prev[0] + 1:
                raise IngestError(f"series {sid!r}: gap at t={cur[0]}, expected t={prev[0] + 1}")
        a = pts[0][0]
        out.append(TimeSeries.of(a, a + len(pts) - 1, [p[1] for p in pts], name=sid))
    return out


def write_csv(path, series) -> None:
    """Write ``{series_id: TimeSeries}`` (or named series) as CSV."""
    items = series.items() if isinstance(series, dict) else [(t.name, t) for t in series]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for sid, t in items:
            for i, v in zip(t.positions(), t.values):
                w.writerow([sid, int(i), repr(float(v))])


# ---------------------------------------------------------------------------
# Store files


def _records(series: CompressedSeries) -> list[dict]:
    out = []
    for seg in series.segments:
        out.append(
            {
                "series_id": series.series_id,
                "a": seg.domain.a,
                "b": seg.domain.b,
                "family_id": series.family.id,
                "dim": seg.fn.dim,
                "coeffs_or_params": [float(x) for x in seg.fn.stored],
                "fes": float(seg.em.fes),
                "ses": float(seg.em.ses),
                "tes": float(seg.em.tes),
            }
        )
    return out


def _write_lines(path: Path, records):
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, allow_nan=False))
            fh.write("\n")
    os.replace(tmp, path)


def save(catalog: Catalog, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    recs = [{"format_version": FORMAT_VERSION}]
    for sid in sorted(catalog.compressed):
        recs.extend(_records(catalog.compressed[sid]))
    _write_lines(path / CATALOG_FILE, recs)
    raws = [
        {"series_id": sid, "a": t.a, "values": [float(v) for v in t.values]}
        for sid, t in sorted(catalog.raw.items())
    ]
    _write_lines(path / RAW_FILE, raws)


def _segment_from(rec, idx):
    try:
        fam = get_family(str(rec["family_id"]))
    except KeyError:
        raise StoreError(f"record {idx}: unknown family {rec['family_id']!r}") from None
    dom = Domain(int(rec["a"]), int(rec["b"]))
    stored = np.array(rec["coeffs_or_params"], dtype=np.float64)
    if len(stored) != int(rec["dim"]):
        raise StoreError(f"record {idx}: dim {rec['dim']} but {len(stored)} stored numbers")
    if fam.is_linear:
        fn = FittedFunction(fam, dom, coeffs=stored)
    else:
        if len(stored) != fam.n_params:
            raise StoreError(f"record {idx}: family {fam.id} needs {fam.n_params} parameters")
        fn = FittedFunction(fam, dom, params=stored)
    em = ErrorMeasures(float(rec["fes"]), float(rec["ses"]), float(rec["tes"]))
    return fam, SegmentRep(dom, fn, em)


def load(path) -> Catalog:
    path = Path(path)
    cat_file = path / CATALOG_FILE
    if not cat_file.exists():
        raise StoreError(f"{path} is not a store (missing {CATALOG_FILE})")
    groups: dict[str, list] = {}
    fams = {}
    with open(cat_file) as fh:
        for idx, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"record {idx}: malformed JSON ({exc.msg})") from None
            if idx == 0:
                if not isinstance(rec, dict) or "format_version" not in rec:
                    raise StoreError("record 0: missing format_version meta record")
                if rec["format_version"] != FORMAT_VERSION:
                    raise StoreError(
                        f"record 0: format_version {rec['format_version']!r} is not supported "
                        f"(expected {FORMAT_VERSION})"
                    )
                continue
            try:
                sid = str(rec["series_id"])
                fam, seg = _segment_from(rec, idx)
            except StoreError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise StoreError(f"record {idx}: malformed segment record ({exc})") from None
            if fams.setdefault(sid, fam) != fam:
                raise StoreError(f"record {idx}: series {sid!r} mixes families")
            groups.setdefault(sid, []).append(seg)
    catalog = Catalog()
    for sid, segs in groups.items():
        segs.sort(key=lambda s: s.domain.a)
        try:
            catalog.add_compressed(CompressedSeries(sid, fams[sid], tuple(segs)))
        except Exception as exc:
            raise StoreError(f"series {sid!r}: {exc}") from None
    raw_file = path / RAW_FILE
    if raw_file.exists():
        with open(raw_file) as fh:
            for idx, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    vals = rec["values"]
                    a = int(rec["a"])
                    sid = str(rec["series_id"])
                    catalog.add_raw(sid, TimeSeries.of(a, a + len(vals) - 1, vals, name=sid))
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    raise StoreError(f"{RAW_FILE} record {idx}: malformed ({exc})") from None
    return catalog


def load_or_empty(path) -> Catalog:
    path = Path(path)
    if not (path / CATALOG_FILE).exists() and not (path / RAW_FILE).exists():
        return Catalog()
    return load(path)
