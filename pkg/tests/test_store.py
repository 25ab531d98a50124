import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctsa import store
from ctsa.compress import compress
from ctsa.core import TimeSeries
from ctsa.errors import CsvParseError, IngestError, MissingRawError, StoreError, UnknownSeriesError
from ctsa.families import get_family

from .conftest import FAMILY_IDS, random_series


def _write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestCsv:
    def test_interleaved_unsorted(self, tmp_path):
        p = _write(tmp_path, "series_id,t,value\nB,2,5\nA,1,0.5\nB,1,4\nA,2,1.5\nA,0,-1\n")
        b, a = store.ingest_csv(p)  # first-appearance order
        assert a.name == "A" and a.a == 0 and list(a.values) == [-1, 0.5, 1.5]
        assert b.name == "B" and b.a == 1 and list(b.values) == [4, 5]

    @pytest.mark.parametrize(
        "body,line",
        [
            ("A,1,x\n", 2),
            ("A,1,1\nA,2,nan\n", 3),
            ("A,1.5,1\n", 2),
            ("A,1\n", 2),
            ("A,1,inf\n", 2),
        ],
    )
    def test_parse_errors_name_line(self, tmp_path, body, line):
        p = _write(tmp_path, "series_id,t,value\n" + body)
        with pytest.raises(CsvParseError) as ei:
            store.ingest_csv(p)
        assert ei.value.line == line
        assert str(ei.value).startswith(f"line {line}:")

    def test_bad_header(self, tmp_path):
        with pytest.raises(CsvParseError):
            store.ingest_csv(_write(tmp_path, "id,time,v\nA,1,2\n"))

    def test_gap(self, tmp_path):
        with pytest.raises(IngestError, match="gap at t=4, expected t=3"):
            store.ingest_csv(_write(tmp_path, "series_id,t,value\nA,1,1\nA,2,1\nA,4,1\n"))

    def test_duplicate(self, tmp_path):
        with pytest.raises(IngestError, match="duplicate"):
            store.ingest_csv(_write(tmp_path, "series_id,t,value\nA,1,1\nA,1,2\n"))

    def test_write_read_round_trip(self, tmp_path, rng):
        s = [TimeSeries.of(3, 12, rng.normal(size=10), name="x"), TimeSeries.of(-2, 2, rng.normal(size=5), name="y")]
        store.write_csv(tmp_path / "o.csv", s)
        back = store.ingest_csv(tmp_path / "o.csv")
        assert back == s


class TestCatalog:
    def test_lookup_errors(self, rng):
        t = random_series(rng, 20)
        cat = store.Catalog(raw={"R": t})
        with pytest.raises(UnknownSeriesError):
            cat.get_raw("nope")
        cat.add_compressed(compress(t, get_family("p0"), "fixed:5", "C"))
        with pytest.raises(MissingRawError):
            cat.get_raw("C")
        assert cat.series_ids() == ["C", "R"] and len(cat) == 2


class TestStoreFiles:
    def _catalog(self, rng):
        cat = store.Catalog()
        for fam in FAMILY_IDS:
            t = random_series(rng, 50)
            cat.add_compressed(compress(t, get_family(fam), "fixed:9", fam))
            cat.add_raw(fam, t)
        return cat

    def test_round_trip(self, tmp_path, rng):
        cat = self._catalog(rng)
        store.save(cat, tmp_path / "s")
        assert store.load(tmp_path / "s") == cat

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(FAMILY_IDS), st.integers(2, 30))
    def test_round_trip_bit_exact(self, tmp_path_factory, seed, fam, seg):
        rng = np.random.default_rng(seed)
        t = random_series(rng, int(rng.integers(10, 80)), a=int(rng.integers(-50, 50)))
        c = compress(t, get_family(fam), f"fixed:{seg}", "S")
        d = tmp_path_factory.mktemp("st")
        store.save(store.Catalog({"S": c}), d)
        back = store.load(d).get_compressed("S")
        for s1, s2 in zip(c, back):
            assert s1.domain == s2.domain and s1.em == s2.em
            assert np.array_equal(s1.fn.stored, s2.fn.stored)

    def test_load_or_empty(self, tmp_path):
        assert len(store.load_or_empty(tmp_path / "missing")) == 0

    def test_not_a_store(self, tmp_path):
        with pytest.raises(StoreError):
            store.load(tmp_path)

    def _corrupt(self, tmp_path, rng, edit):
        cat = self._catalog(rng)
        store.save(cat, tmp_path)
        f = tmp_path / "catalog.jsonl"
        lines = f.read_text().splitlines()
        edit(lines)
        f.write_text("\n".join(lines) + "\n")

    def test_version_mismatch(self, tmp_path, rng):
        def edit(lines):
            lines[0] = json.dumps({"format_version": 99})

        self._corrupt(tmp_path, rng, edit)
        with pytest.raises(StoreError, match="format_version"):
            store.load(tmp_path)

    def test_unknown_family(self, tmp_path, rng):
        def edit(lines):
            rec = json.loads(lines[1])
            rec["family_id"] = "spline"
            lines[1] = json.dumps(rec)

        self._corrupt(tmp_path, rng, edit)
        with pytest.raises(StoreError, match="record 1: unknown family 'spline'"):
            store.load(tmp_path)

    def test_malformed_json(self, tmp_path, rng):
        def edit(lines):
            lines[2] = lines[2][:-5]

        self._corrupt(tmp_path, rng, edit)
        with pytest.raises(StoreError, match="record 2"):
            store.load(tmp_path)

    def test_missing_field(self, tmp_path, rng):
        def edit(lines):
            rec = json.loads(lines[3])
            del rec["fes"]
            lines[3] = json.dumps(rec)

        self._corrupt(tmp_path, rng, edit)
        with pytest.raises(StoreError, match="record 3"):
            store.load(tmp_path)

    def test_gap_between_segments(self, tmp_path, rng):
        def edit(lines):
            del lines[2]

        self._corrupt(tmp_path, rng, edit)
        with pytest.raises(StoreError, match="contiguous"):
            store.load(tmp_path)
