from __future__ import annotations

import numpy as np
import pytest

from mama_kg.records import (
    LAYOUT_PER_HEAD,
    LAYOUT_REDUCED,
    AttentionTensor,
    NounChunk,
    SentenceRecord,
    TokenAnnotation,
)


def make_tokens(specs):
    """specs: list of (text, lemma, pos) -> tuple of TokenAnnotation with
    whitespace-joined char offsets."""
    toks = []
    pos = 0
    for text, lemma, tag in specs:
        toks.append(TokenAnnotation(text, lemma, tag, pos, pos + len(text)))
        pos += len(text) + 1
    return tuple(toks)


def make_record(token_specs, chunk_spans, attention, doc_id="doc", sent_id=0, **att_kw):
    """Build a validated-shape record from shorthand.

    chunk_spans: list of (first, last) or (first, last, resolved_surface).
    attention: nested lists or ndarray; [T,T] or [H,T,T].
    """
    tokens = make_tokens(token_specs)
    chunks = []
    for span in chunk_spans:
        first, last = span[0], span[1]
        resolved = span[2] if len(span) > 2 else None
        surface = " ".join(t.text for t in tokens[first : last + 1])
        chunks.append(NounChunk(first, last, surface, resolved))
    values = np.asarray(attention, dtype=np.float32)
    if values.ndim == 3:
        att = AttentionTensor(
            layout=LAYOUT_PER_HEAD,
            dim=values.shape[1],
            values=values,
            num_heads=values.shape[0],
            reduction_applied="none",
            **att_kw,
        )
    else:
        att = AttentionTensor(
            layout=LAYOUT_REDUCED,
            dim=values.shape[0],
            values=values,
            reduction_applied=att_kw.pop("reduction_applied", "mean"),
            **att_kw,
        )
    text = " ".join(t.text for t in tokens)
    return SentenceRecord(
        doc_id=doc_id,
        sent_id=sent_id,
        text=text,
        tokens=tokens,
        chunks=tuple(chunks),
        attention=att,
    )


WALKTHROUGH_TOKENS = [
    ("Dylan", "dylan", "PROPN"),
    ("is", "be", "AUX"),
    ("a", "a", "DET"),
    ("songwriter", "songwriter", "NOUN"),
    (".", ".", "PUNCT"),
]


def walkthrough_attention():
    a = np.zeros((5, 5), dtype=np.float32)
    a[1, 0] = 0.3  # "is" attends to "Dylan"
    a[3, 1] = 0.4  # "songwriter" attends to "is"
    a[2, 0] = 0.1  # "a" attends to "Dylan"
    a[3, 2] = 0.2  # "songwriter" attends to "a"
    return a


@pytest.fixture
def walkthrough_record():
    return make_record(WALKTHROUGH_TOKENS, [(0, 0), (3, 3)], walkthrough_attention(), doc_id="walkthrough")
