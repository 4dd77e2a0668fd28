"""Oriented string rewriting on edge words, with bounded completion.

Words are tuples of edge ids in written (right-to-left composition) order.
Rules always decrease the word in a shortlex order that compares letters in
*traversal* order, i.e. starting from the source end of the word.  Each letter
is ranked by a caller-supplied key: the declaration index for categories, and
``(color, index)`` for k-graphs so that squares orient toward color-sorted
words.
"""

from __future__ import annotations

import warnings
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

from ..errors import UnorientableRelation

Word = tuple[str, ...]


def word_key(word: Word, rank: Mapping[str, Any]) -> tuple:
    return (len(word), tuple(rank[x] for x in reversed(word)))


def orient(u: Word, v: Word, rank: Mapping[str, Any]) -> tuple[Word, Word] | None:
    """Return ``(larger, smaller)``, or ``None`` when the words coincide."""
    if u == v:
        return None
    return (u, v) if word_key(u, rank) > word_key(v, rank) else (v, u)


@dataclass(frozen=True)
class RewriteSystem:
    rules: tuple[tuple[Word, Word], ...]
    rank: Mapping[str, Any]
    complete: bool = True
    completion_bound: int | None = None
    _by_first: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        index: dict[str, list[tuple[Word, Word]]] = defaultdict(list)
        for lhs, rhs in self.rules:
            index[lhs[0]].append((lhs, rhs))
        for lst in index.values():
            lst.sort(key=lambda r: len(r[0]))
        object.__setattr__(self, "_by_first", dict(index))

    def __len__(self) -> int:
        return len(self.rules)

    def key(self, word: Word) -> tuple:
        return word_key(word, self.rank)

    def _match_at(self, word: Word, i: int) -> tuple[Word, Word] | None:
        for lhs, rhs in self._by_first.get(word[i], ()):
            if word[i : i + len(lhs)] == lhs:
                return lhs, rhs
        return None

    def is_irreducible(self, word: Word) -> bool:
        return all(self._match_at(word, i) is None for i in range(len(word)))

    def normal_form(self, word: Iterable[str]) -> Word:
        """Leftmost-innermost rewriting until no rule applies."""
        w = tuple(word)
        longest = max((len(lhs) for lhs, _ in self.rules), default=1)
        i = 0
        while i < len(w):
            hit = self._match_at(w, i)
            if hit is None:
                i += 1
                continue
            lhs, rhs = hit
            w = w[:i] + rhs + w[i + len(lhs) :]
            i = max(0, i - longest + 1)
        return w

    def successors(self, word: Word) -> Iterator[Word]:
        """Every one-step rewrite of ``word`` (all rules, all positions)."""
        for i in range(len(word)):
            for lhs, rhs in self._by_first.get(word[i], ()):
                if word[i : i + len(lhs)] == lhs:
                    yield word[:i] + rhs + word[i + len(lhs) :]

    def critical_pairs(self) -> Iterator[tuple[Word, Word, Word]]:
        """Yield ``(overlap_word, reduct_1, reduct_2)`` for every rule overlap."""
        for l1, r1 in self.rules:
            for l2, r2 in self.rules:
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        yield l1 + l2[k:], r1 + l2[k:], l1[:-k] + r2
                if l1 != l2 and len(l2) < len(l1):
                    for i in range(len(l1) - len(l2) + 1):
                        if l1[i : i + len(l2)] == l2:
                            yield l1, r1, l1[:i] + r2 + l1[i + len(l2) :]

    def unresolved_critical_pairs(self) -> list[tuple[Word, Word, Word]]:
        return [
            (w, a, b)
            for w, a, b in self.critical_pairs()
            if self.normal_form(a) != self.normal_form(b)
        ]


def complete(
    equations: Iterable[tuple[Word, Word]],
    rank: Mapping[str, Any],
    max_length: int = 8,
    max_steps: int = 10_000,
) -> RewriteSystem:
    """Orient ``equations`` and close them under overlaps (bounded Knuth-Bendix).

    New rules longer than ``max_length`` are not added; if that happens, or the
    step budget runs out, the result is marked ``complete=False``.
    """
    rules: dict[Word, Word] = {}
    pending: deque[tuple[Word, Word]] = deque()
    for u, v in equations:
        if u == v:
            warnings.warn(
                f"relation {' '.join(u) or '<vertex>'} = itself is unorientable; dropped",
                UnorientableRelation,
                stacklevel=3,
            )
            continue
        pending.append((tuple(u), tuple(v)))

    def current() -> RewriteSystem:
        return RewriteSystem(tuple(sorted(rules.items(), key=lambda r: word_key(r[0], rank))), rank)

    system = current()
    truncated = False
    steps = 0
    while pending:
        steps += 1
        if steps > max_steps:
            truncated = True
            break
        u, v = pending.popleft()
        u, v = system.normal_form(u), system.normal_form(v)
        oriented = orient(u, v, rank)
        if oriented is None:
            continue
        lhs, rhs = oriented
        if len(lhs) > max_length:
            truncated = True
            continue
        # interreduce: rules whose lhs contains the new lhs go back on the queue
        for old_lhs in list(rules):
            if any(old_lhs[i : i + len(lhs)] == lhs for i in range(len(old_lhs) - len(lhs) + 1)):
                pending.append((old_lhs, rules.pop(old_lhs)))
        rules[lhs] = rhs
        system = current()
        for old_lhs, old_rhs in list(rules.items()):
            nf = system.normal_form(old_rhs)
            if nf != old_rhs:
                rules[old_lhs] = nf
        system = current()
        for _, a, b in system.critical_pairs():
            pending.append((a, b))

    result = RewriteSystem(system.rules, rank, complete=not truncated, completion_bound=max_length)
    if result.unresolved_critical_pairs():
        result = RewriteSystem(system.rules, rank, complete=False, completion_bound=max_length)
    return result
