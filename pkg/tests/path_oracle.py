"""Independent oracle for the beam search: exhaustive path enumeration.

Deliberately shares no code with mama_kg.match. Enumerates every strictly
monotone token path from the head edge to the tail edge by depth-first
recursion, summing step scores in path order with one float32 rounding per
step (the degree arithmetic the matcher promises).
"""

from __future__ import annotations

import numpy as np


def enumerate_paths(values, head_span, tail_span, max_relation_len):
    """All (relation_positions, degree) pairs reachable within the depth bound.

    values: 2-d indexable attention, values[p][q] = score of stepping onto p
    from q. head_span/tail_span: inclusive (first, last) token index pairs.
    Relation length is strictly below max_relation_len (the terminal hop onto
    the tail spends one depth level). Includes the empty relation path.
    """
    forward = head_span[0] < tail_span[0]
    if forward:
        start, tail_edge = head_span[1], tail_span[0]
        step = 1
    else:
        start, tail_edge = head_span[0], tail_span[1]
        step = -1

    out = []

    def walk(pos, rel, degree, depth):
        for p in range(pos + step, tail_edge + step, step):
            d = float(np.float32(degree) + np.float32(values[p][pos]))
            if p == tail_edge:
                out.append((tuple(rel), d))
            elif depth < max_relation_len:
                rel.append(p)
                walk(p, rel, d, depth + 1)
                rel.pop()

    walk(start, [], 0.0, 1)
    return out


def best_paths(values, head_span, tail_span, max_relation_len, limit=None):
    """Non-empty-relation paths ranked like the matcher ranks returned facts."""
    paths = [
        (rel, deg)
        for rel, deg in enumerate_paths(values, head_span, tail_span, max_relation_len)
        if rel
    ]
    ranked = sorted(
        paths,
        key=lambda p: (-(p[1] / (len(p[0]) + 1)), p[0][-1], len(p[0]), p[0]),
    )
    return ranked if limit is None else ranked[:limit]
