import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_record
from mama_kg.records import (
    LAYOUT_PER_HEAD,
    LAYOUT_REDUCED,
    UPOS_TAGS,
    AlreadyReduced,
    AttentionTensor,
    BadEncoding,
    MalformedRecord,
    NounChunk,
    RecordError,
    SentenceRecord,
    ShapeMismatch,
    TokenAnnotation,
    ValidationError,
    read_records,
    record_from_json,
    record_to_json,
    reduce_attention,
    validate_record,
    write_records,
)


def small_record(dim=5, doc=None):
    specs = [(f"t{i}", f"t{i}", "NOUN") for i in range(dim)]
    rng = np.random.default_rng(dim)
    return make_record(
        specs,
        [(0, 0), (dim - 1, dim - 1)],
        rng.random((dim, dim), dtype=np.float32),
        doc_id=doc or f"doc{dim}",
    )


def test_roundtrip_single_record():
    rec = small_record(5)
    buf = io.StringIO()
    assert write_records([rec], buf) == 1
    got = list(read_records(io.StringIO(buf.getvalue())))
    assert len(got) == 1
    assert got[0] == rec
    assert got[0].attention.values.tobytes() == rec.attention.values.tobytes()


def test_shape_mismatch_line_number():
    # drop a token so the token count is 4 but the payload stays 5x5
    import json

    rec = small_record(5)
    line_ok = record_to_json(rec)
    obj = json.loads(line_ok)
    obj["tokens"] = obj["tokens"][:4]
    obj["chunks"] = [c for c in obj["chunks"] if c["last_token"] < 4]
    bad = json.dumps(obj)
    stream = io.StringIO(line_ok + "\n" + bad + "\n")
    it = read_records(stream)
    next(it)
    with pytest.raises((ShapeMismatch, BadEncoding)) as exc:
        next(it)
    assert exc.value.line == 2


def test_dim_vs_tokens_is_shape_mismatch():
    import json

    rec = small_record(4)
    obj = json.loads(record_to_json(rec))
    obj["tokens"] = obj["tokens"][:3]
    obj["chunks"] = []
    with pytest.raises(ShapeMismatch):
        record_from_json(json.dumps(obj), 7)


def test_empty_stream_yields_nothing():
    assert list(read_records(io.StringIO(""))) == []


def test_bad_json_is_malformed_with_line():
    with pytest.raises(MalformedRecord) as exc:
        list(read_records(io.StringIO("{not json\n")))
    assert exc.value.line == 1


def test_bad_base64_is_bad_encoding():
    import json

    obj = json.loads(record_to_json(small_record(3)))
    obj["attention"]["data_b64"] = "!!!not-base64!!!"
    with pytest.raises(BadEncoding):
        record_from_json(json.dumps(obj))


def test_on_error_skips_and_counts():
    lines = [record_to_json(small_record(3)), "{broken", record_to_json(small_record(4))]
    seen = []
    got = list(read_records(io.StringIO("\n".join(lines) + "\n"), on_error=seen.append))
    assert len(got) == 2
    assert len(seen) == 1 and seen[0].line == 2


def test_duplicate_record_key_rejected():
    rec = small_record(3)
    buf = io.StringIO()
    with pytest.raises(ValidationError):
        write_records([rec, rec], buf)
    assert buf.getvalue() == ""
    lines = record_to_json(rec) + "\n" + record_to_json(rec) + "\n"
    with pytest.raises(ValidationError) as exc:
        list(read_records(io.StringIO(lines)))
    assert exc.value.line == 2


def test_writer_validates_before_any_bytes():
    rec = small_record(4)
    # chunks out of order violates the ordering invariant
    bad = SentenceRecord(
        doc_id=rec.doc_id,
        sent_id=rec.sent_id,
        text=rec.text,
        tokens=rec.tokens,
        chunks=(NounChunk(3, 3, "t3"), NounChunk(0, 0, "t0")),
        attention=rec.attention,
    )
    buf = io.StringIO()
    with pytest.raises(ValidationError):
        write_records([rec, bad], buf)
    assert buf.getvalue() == ""


def test_zero_records_written():
    buf = io.StringIO()
    assert write_records([], buf) == 0
    assert buf.getvalue() == ""


def test_pos_inventory_is_validated():
    with pytest.raises(ValidationError):
        validate_record(
            make_record([("x", "x", "NOT_A_TAG")], [], np.zeros((1, 1), dtype=np.float32))
        )


def test_negative_attention_rejected():
    with pytest.raises(ValidationError):
        validate_record(make_record([("x", "x", "NOUN")], [], [[-0.5]]))


def test_nan_attention_rejected():
    with pytest.raises(ValidationError):
        validate_record(make_record([("x", "x", "NOUN")], [], [[float("nan")]]))


def test_reduce_mean_example():
    rec = make_record(
        [("a", "a", "NOUN"), ("b", "b", "NOUN")],
        [],
        [[[0.6, 0.4], [0.5, 0.5]], [[0.2, 0.8], [0.1, 0.9]]],
    )
    out = reduce_attention(rec.attention, "mean")
    assert out.layout == LAYOUT_REDUCED and out.reduction_applied == "mean"
    np.testing.assert_array_equal(out.values, np.array([[0.4, 0.6], [0.3, 0.7]], dtype=np.float32))


def test_reduce_max_example():
    rec = make_record(
        [("a", "a", "NOUN"), ("b", "b", "NOUN")],
        [],
        [[[0.6, 0.4], [0.5, 0.5]], [[0.2, 0.8], [0.1, 0.9]]],
    )
    out = reduce_attention(rec.attention, "max")
    np.testing.assert_array_equal(out.values, np.array([[0.6, 0.8], [0.5, 0.9]], dtype=np.float32))


def test_reduce_single_head_identity():
    vals = np.random.default_rng(0).random((1, 3, 3), dtype=np.float32)
    rec = make_record([("a", "a", "NOUN")] * 3, [], vals)
    for op in ("mean", "max"):
        out = reduce_attention(rec.attention, op)
        assert out.values.tobytes() == vals[0].tobytes()


def test_reduce_already_reduced_raises():
    rec = small_record(3)
    with pytest.raises(AlreadyReduced):
        reduce_attention(rec.attention, "mean")


@st.composite
def record_strategy(draw):
    n = draw(st.integers(1, 6))
    specs = []
    for i in range(n):
        text = draw(st.text(alphabet="abcdefg", min_size=1, max_size=4))
        specs.append((text, text, draw(st.sampled_from(sorted(UPOS_TAGS)))))
    n_chunks = draw(st.integers(0, min(2, n)))
    spans = []
    used = 0
    for _ in range(n_chunks):
        if used >= n:
            break
        first = draw(st.integers(used, n - 1))
        last = draw(st.integers(first, n - 1))
        spans.append((first, last))
        used = last + 1
    per_head = draw(st.booleans())
    shape = (draw(st.integers(1, 3)), n, n) if per_head else (n, n)
    flat = draw(
        st.lists(
            st.floats(0, 1, width=32, allow_nan=False),
            min_size=int(np.prod(shape)),
            max_size=int(np.prod(shape)),
        )
    )
    values = np.array(flat, dtype=np.float32).reshape(shape)
    return make_record(specs, spans, values)


@given(record_strategy())
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(rec):
    validate_record(rec)
    line = record_to_json(rec)
    back = record_from_json(line)
    assert back == rec
    assert back.attention.values.tobytes() == rec.attention.values.tobytes()


@given(record_strategy())
@settings(max_examples=40, deadline=None)
def test_reduce_mean_bounded_and_max_matches_loop(rec):
    if rec.attention.layout != LAYOUT_PER_HEAD:
        return
    vals = rec.attention.values
    mean = reduce_attention(rec.attention, "mean").values
    assert np.all(mean >= vals.min(axis=0)) and np.all(mean <= vals.max(axis=0))
    mx = reduce_attention(rec.attention, "max").values
    h, t, _ = vals.shape
    for i in range(t):
        for j in range(t):
            expect = max(float(vals[k, i, j]) for k in range(h))
            assert float(mx[i, j]) == expect


def test_reader_is_single_pass_and_order_preserving():
    recs = [small_record(3), small_record(4), small_record(5)]
    buf = io.StringIO()
    write_records(recs, buf)

    consumed = []

    class CountingLines:
        def __init__(self, text):
            self.lines = text.splitlines(keepends=True)
            self.i = 0

        def __iter__(self):
            return self

        def __next__(self):
            if self.i >= len(self.lines):
                raise StopIteration
            line = self.lines[self.i]
            self.i += 1
            consumed.append(self.i)
            return line

    got = list(read_records(CountingLines(buf.getvalue())))
    assert [r.attention.dim for r in got] == [3, 4, 5]
    assert consumed == [1, 2, 3]
