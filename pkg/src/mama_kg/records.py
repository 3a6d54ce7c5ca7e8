"""Sentence-annotation interchange format: types, JSONL reader/writer, head reduction.

One record per line; attention payloads are base64 of little-endian float32,
row-major. The attention convention used everywhere downstream: values[i][j]
is the weight with which token i (the attending token) attends to token j.
"""

from __future__ import annotations

import base64
import binascii
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Iterator

import numpy as np

UPOS_TAGS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split()
)

LAYOUT_REDUCED = "reduced"
LAYOUT_PER_HEAD = "per_head"


class RecordError(Exception):
    """Base for structured interchange errors; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.message = message
        self.line = line


class MalformedRecord(RecordError):
    """Bad JSON, missing field, or wrong field type."""


class ShapeMismatch(RecordError):
    """Attention dimension does not match the token count."""


class BadEncoding(RecordError):
    """Payload not decodable as an f32 array of the declared shape."""


class ValidationError(RecordError):
    """A record invariant does not hold."""


class AlreadyReduced(Exception):
    """reduce_attention called on an already-reduced tensor."""


@dataclass(frozen=True)
class TokenAnnotation:
    text: str
    lemma: str
    pos: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class NounChunk:
    first_token: int
    last_token: int
    surface: str
    resolved_surface: str | None = None


@dataclass(frozen=True, eq=False)
class AttentionTensor:
    """Attention weights for one sentence, reduced [T,T] or per-head [H,T,T]."""

    layout: str
    dim: int
    values: np.ndarray
    layer_spec: str = "last"
    reduction_applied: str = "none"
    num_heads: int | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttentionTensor):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.dim == other.dim
            and self.layer_spec == other.layer_spec
            and self.reduction_applied == other.reduction_applied
            and self.num_heads == other.num_heads
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
        )


@dataclass(frozen=True)
class SentenceRecord:
    doc_id: str
    sent_id: int
    text: str
    tokens: tuple[TokenAnnotation, ...]
    chunks: tuple[NounChunk, ...]
    attention: AttentionTensor

    @property
    def token_texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


def validate_record(rec: SentenceRecord) -> None:
    """Raise ValidationError if any record invariant is violated."""
    if rec.sent_id < 0:
        raise ValidationError(f"sent_id must be non-negative, got {rec.sent_id}")
    prev_end = -1
    for i, tok in enumerate(rec.tokens):
        if tok.pos not in UPOS_TAGS:
            raise ValidationError(f"token {i}: unknown POS tag {tok.pos!r}")
        if not tok.char_start < tok.char_end:
            raise ValidationError(f"token {i}: empty or inverted span")
        if tok.char_start < prev_end:
            raise ValidationError(f"token {i}: spans overlap or are out of order")
        prev_end = tok.char_end
    n = len(rec.tokens)
    prev_last = -1
    for i, ch in enumerate(rec.chunks):
        if not (0 <= ch.first_token <= ch.last_token < n):
            raise ValidationError(f"chunk {i}: token span out of range")
        if ch.first_token <= prev_last:
            raise ValidationError(f"chunk {i}: chunks overlap or are out of order")
        prev_last = ch.last_token
    att = rec.attention
    if att.layout not in (LAYOUT_REDUCED, LAYOUT_PER_HEAD):
        raise ValidationError(f"unknown attention layout {att.layout!r}")
    if (att.layout == LAYOUT_REDUCED) != (att.reduction_applied != "none"):
        raise ValidationError(
            f"layout {att.layout!r} inconsistent with reduction {att.reduction_applied!r}"
        )
    if att.reduction_applied not in ("none", "mean", "max"):
        raise ValidationError(f"unknown reduction {att.reduction_applied!r}")
    if att.layout == LAYOUT_PER_HEAD:
        if not att.num_heads or att.num_heads < 1:
            raise ValidationError("per-head attention requires a positive num_heads")
        expect = (att.num_heads, att.dim, att.dim)
    else:
        expect = (att.dim, att.dim)
    if att.values.shape != expect:
        raise ValidationError(f"attention shape {att.values.shape} != declared {expect}")
    if att.values.dtype != np.float32:
        raise ValidationError(f"attention dtype {att.values.dtype} != float32")
    if att.dim != n:
        raise ShapeMismatch(f"attention dim {att.dim} != token count {n}")
    if not np.all(att.values >= 0):
        raise ValidationError("attention entries must be >= 0 (and not NaN)")


def _encode_attention(att: AttentionTensor) -> dict:
    out = {
        "layout": att.layout,
        "dim": att.dim,
        "layer_spec": att.layer_spec,
        "reduction_applied": att.reduction_applied,
        "data_b64": base64.b64encode(
            np.ascontiguousarray(att.values, dtype="<f4").tobytes()
        ).decode("ascii"),
    }
    if att.num_heads is not None:
        out["num_heads"] = att.num_heads
    return out


def _decode_attention(obj: dict, line: int | None) -> AttentionTensor:
    try:
        layout = obj["layout"]
        dim = obj["dim"]
        layer_spec = obj["layer_spec"]
        reduction = obj["reduction_applied"]
        data_b64 = obj["data_b64"]
        num_heads = obj.get("num_heads")
    except (KeyError, TypeError) as e:
        raise MalformedRecord(f"attention object missing field: {e}", line) from e
    try:
        raw = base64.b64decode(data_b64, validate=True)
        flat = np.frombuffer(raw, dtype="<f4")
    except (binascii.Error, ValueError, TypeError) as e:
        raise BadEncoding(f"attention payload is not valid base64/f32: {e}", line) from e
    if layout == LAYOUT_PER_HEAD:
        shape: tuple[int, ...] = (num_heads or 0, dim, dim)
    else:
        shape = (dim, dim)
    if flat.size != int(np.prod(shape)):
        raise BadEncoding(
            f"attention payload has {flat.size} values, declared shape {shape}", line
        )
    values = flat.reshape(shape)
    values.flags.writeable = False
    return AttentionTensor(
        layout=layout,
        dim=dim,
        values=values,
        layer_spec=layer_spec,
        reduction_applied=reduction,
        num_heads=num_heads,
    )


def record_to_json(rec: SentenceRecord) -> str:
    chunks = []
    for ch in rec.chunks:
        c = {"first_token": ch.first_token, "last_token": ch.last_token, "surface": ch.surface}
        if ch.resolved_surface is not None:
            c["resolved_surface"] = ch.resolved_surface
        chunks.append(c)
    obj = {
        "doc_id": rec.doc_id,
        "sent_id": rec.sent_id,
        "text": rec.text,
        "tokens": [
            {
                "text": t.text,
                "lemma": t.lemma,
                "pos": t.pos,
                "char_start": t.char_start,
                "char_end": t.char_end,
            }
            for t in rec.tokens
        ],
        "chunks": chunks,
        "attention": _encode_attention(rec.attention),
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def record_from_json(line: str, lineno: int | None = None) -> SentenceRecord:
    """Parse and validate one interchange line; raises a RecordError subclass."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"invalid JSON: {e}", lineno) from e
    try:
        tokens = tuple(
            TokenAnnotation(
                text=t["text"],
                lemma=t["lemma"],
                pos=t["pos"],
                char_start=t["char_start"],
                char_end=t["char_end"],
            )
            for t in obj["tokens"]
        )
        chunks = tuple(
            NounChunk(
                first_token=c["first_token"],
                last_token=c["last_token"],
                surface=c["surface"],
                resolved_surface=c.get("resolved_surface"),
            )
            for c in obj["chunks"]
        )
        rec = SentenceRecord(
            doc_id=obj["doc_id"],
            sent_id=obj["sent_id"],
            text=obj["text"],
            tokens=tokens,
            chunks=chunks,
            attention=_decode_attention(obj["attention"], lineno),
        )
    except RecordError:
        raise
    except (KeyError, TypeError) as e:
        raise MalformedRecord(f"missing or mistyped field: {e}", lineno) from e
    try:
        validate_record(rec)
    except RecordError as e:
        raise type(e)(e.message, lineno) from None
    return rec


def _open_lines(source: str | Path | IO) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            yield from f
        return
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def read_records(
    source: str | Path | IO,
    on_error: Callable[[RecordError], None] | None = None,
) -> Iterator[SentenceRecord]:
    """Lazily yield validated records in file order.

    By default a bad line raises its structured RecordError (with line number).
    Passing `on_error` turns that into a callback so iteration continues —
    the per-record failure policy the pipeline runner uses. Duplicate
    (doc_id, sent_id) keys within one stream are rejected; uniqueness across
    partitions is the exporter's contract.
    """
    seen: set[tuple[str, int]] = set()
    for lineno, line in enumerate(_open_lines(source), 1):
        if not line.strip():
            continue
        try:
            rec = record_from_json(line, lineno)
            key = (rec.doc_id, rec.sent_id)
            if key in seen:
                raise ValidationError(f"duplicate (doc_id, sent_id) {key}", lineno)
            seen.add(key)
        except UnicodeDecodeError as e:
            err = MalformedRecord(f"not valid UTF-8: {e}", lineno)
            if on_error is None:
                raise err from e
            on_error(err)
            continue
        except RecordError as e:
            if on_error is None:
                raise
            on_error(e)
            continue
        yield rec


def write_records(records: Iterable[SentenceRecord], sink: str | Path | IO) -> int:
    """Write records as JSONL. Validates everything first: a bad record means
    no bytes are written. Returns the number of records written."""
    lines = []
    seen: set[tuple[str, int]] = set()
    for rec in records:
        validate_record(rec)
        key = (rec.doc_id, rec.sent_id)
        if key in seen:
            raise ValidationError(f"duplicate (doc_id, sent_id) {key}")
        seen.add(key)
        lines.append(record_to_json(rec))
    payload = "".join(line + "\n" for line in lines)
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as f:
            f.write(payload)
    elif isinstance(sink, io.TextIOBase):
        sink.write(payload)
    else:
        sink.write(payload.encode("utf-8"))
    return len(lines)


def reduce_attention(att: AttentionTensor, op: str) -> AttentionTensor:
    """Collapse per-head attention [H,T,T] to a single head [T,T] via mean or max."""
    if att.layout == LAYOUT_REDUCED:
        raise AlreadyReduced("attention is already reduced")
    if op not in ("mean", "max"):
        raise ValueError(f"unknown reduction op {op!r}")
    if op == "mean":
        values = np.mean(att.values, axis=0, dtype=np.float64).astype(np.float32)
    else:
        values = np.max(att.values, axis=0).astype(np.float32)
    values.flags.writeable = False
    return AttentionTensor(
        layout=LAYOUT_REDUCED,
        dim=att.dim,
        values=values,
        layer_spec=att.layer_spec,
        reduction_applied=op,
        num_heads=None,
    )
