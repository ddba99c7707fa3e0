from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from picrecon.deck_index import (DeckIndex, OverlapKey, far_line, overlap_bits, overlap_key)
from picrecon.errors import InputError, StaleCheckpointError
from picrecon.grid import Deck, KGrid, code_to_cells, deck, random_picture


def test_overlap_bits_by_hand():
    g = KGrid.from_cells([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    # left = first two columns, kept in place
    assert overlap_bits(g.code, 3, "left") == KGrid.from_cells([[1, 0, 0], [0, 1, 0], [1, 1, 0]]).code
    assert overlap_bits(g.code, 3, "right") == KGrid.from_cells([[0, 0, 1], [0, 1, 1], [0, 1, 0]]).code
    assert overlap_bits(g.code, 3, "top") == KGrid.from_cells([[1, 0, 1], [0, 1, 1], [0, 0, 0]]).code
    assert overlap_bits(g.code, 3, "bottom") == KGrid.from_cells([[0, 0, 0], [0, 1, 1], [1, 1, 0]]).code
    with pytest.raises(InputError):
        overlap_bits(g.code, 3, "diagonal")


def test_far_line_by_hand():
    g = KGrid.from_cells([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    assert far_line(g.code, 3, "left") == 0b110  # last column, top to bottom
    assert far_line(g.code, 3, "right") == 0b101  # first column
    assert far_line(g.code, 3, "top") == 0b110  # last row
    assert far_line(g.code, 3, "bottom") == 0b101  # first row


def test_overlap_key_from_block():
    block = [[1, 0], [0, 1], [1, 1]]
    assert overlap_key("left", block, 3) == OverlapKey("left", KGrid.from_cells(
        [[1, 0, 0], [0, 1, 0], [1, 1, 0]]).code)
    with pytest.raises(InputError):
        overlap_key("top", block, 3)


def index_for(seed, n=12, k=3):
    return DeckIndex(deck(random_picture(n, seed), k), seed)


@given(st.integers(0, 10_000), st.sampled_from(["left", "right", "top", "bottom"]))
@settings(max_examples=40, deadline=None)
def test_buckets_are_exact(seed, side):
    ix = index_for(seed)
    k = ix.k
    listed = Counter()
    for bits, codes in ix.buckets[side].items():
        for code in codes:
            assert overlap_bits(code, k, side) == bits
            listed[code] += 1
    assert set(listed) == set(ix.initial) and set(listed.values()) == {1}


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_order_is_a_permutation_and_rank_respected(seed):
    ix = index_for(seed)
    assert Counter(ix.order) == Counter(ix.initial)
    for codes in ix.buckets["left"].values():
        ranks = [ix.rank[c] for c in codes]
        assert ranks == sorted(ranks)
    assert ix.first() == ix.order[0]


def test_same_seed_same_order():
    d = deck(random_picture(16, 1), 3)
    assert DeckIndex(d, 5).order == DeckIndex(d, 5).order
    assert DeckIndex(d, 5).order != DeckIndex(d, 6).order


def test_remove_until_exhausted():
    ix = DeckIndex(Deck(1, {0: 2, 1: 2}), 0)
    assert ix.remove(0) and ix.remove(0)
    assert not ix.remove(0)
    assert ix.remaining_total == 2
    assert list(ix.removed()) == [0, 0]


def test_checkpoint_rollback_and_commit():
    ix = DeckIndex(Deck(1, {0: 3, 1: 1}), 0)
    a = ix.checkpoint()
    ix.remove(0)
    b = ix.checkpoint()
    ix.remove(1)
    ix.remove(0)
    ix.rollback(b)
    assert ix.remaining == {0: 2, 1: 1}
    with pytest.raises(StaleCheckpointError):
        ix.rollback(b)
    ix.remove(1)
    ix.commit(a)
    assert ix.remaining == {0: 2, 1: 0}
    with pytest.raises(StaleCheckpointError):
        ix.commit(a)


@given(st.lists(st.tuples(st.sampled_from(["remove", "check", "roll", "commit"]),
                          st.integers(0, 3)), max_size=60))
@settings(max_examples=80, deadline=None)
def test_rollback_restores_exact_counts(ops):
    d = Deck(1, {0: 3, 1: 2})
    ix = DeckIndex(d, 0)
    stack = []  # (token, snapshot)
    for op, arg in ops:
        if op == "remove":
            ix.remove(arg % 2)
        elif op == "check":
            stack.append((ix.checkpoint(), dict(ix.remaining)))
        elif stack and op == "roll":
            token, snap = stack[-1]
            ix.rollback(token)
            stack.pop()
            assert ix.remaining == snap
        elif stack and op == "commit":
            ix.commit(stack.pop()[0])
        for code, m in ix.remaining.items():
            assert 0 <= m <= d.counts[code]


def test_reservations_reduce_availability():
    ix = DeckIndex(Deck(1, {0: 1, 1: 1}), 0)
    assert ix.reserve(0)
    assert not ix.reserve(0)
    assert ix.available(0) == 0
    assert [g.code for g, _ in ix.candidates(OverlapKey("left", 0))] == [1]
    ix.release(0)
    assert ix.available(0) == 1


def test_empty_deck_rejected():
    with pytest.raises(InputError):
        DeckIndex(Deck(2, {}), 0)


def test_remaining_deck():
    d = deck(random_picture(8, 3), 2)
    ix = DeckIndex(d, 3)
    code = ix.first()
    ix.remove(code)
    rest = ix.remaining_deck()
    assert rest.total == d.total - 1
    assert all(code_to_cells(c, 2) for c in rest.counts)
