"""Signature codebooks over prime fields for the noiseless adder channel.

The channel outputs the symbol-wise sum over F_q of every transmitted
codeword.  A codebook here guarantees two things:

* unique-sum decodability: sums of any two distinct subsets of at most K
  codewords differ, so up to K simultaneous transmitters are identified
  exactly from the sum alone;
* exact multiplicity: coordinate 0 of every codeword is 1 and q > M, so
  coordinate 0 of the received sum equals the transmitter count C for any
  C <= M, even when C > K and the identities are not decodable.

Construction is randomized search with incremental collision checking,
followed by an exhaustive verification pass over all subsets of size <= K.
Feasible at desk scale only (M up to ~16, K up to ~3: the decoder's sum
table has sum_{s<=K} C(M,s) entries and verification touches all of them).
Only prime q is supported; prime-power extension fields are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

__all__ = [
    "Codebook",
    "ConstructionError",
    "IntegrityError",
    "construct_codebook",
    "adder_channel",
    "decode",
    "verify_codebook",
    "benchmark_length_bits",
    "codebook_to_dict",
    "codebook_from_dict",
]


class ConstructionError(RuntimeError):
    """Search budget exhausted; says nothing about existence."""


class IntegrityError(RuntimeError):
    """Received word inconsistent with the codebook under a noiseless channel."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass
class Codebook:
    """M signature codewords of length L over F_q (q prime, q > M).

    codewords[m][0] == 1 for every m.  search_seed records the RNG seed of
    the winning construction attempt when built by construct_codebook.
    """

    M: int
    K: int
    q: int
    L: int
    codewords: tuple[tuple[int, ...], ...]
    search_seed: int | None = field(default=None, compare=False)
    _sum_table: dict | None = field(default=None, init=False, repr=False, compare=False)

    def achieved_bits(self) -> float:
        """Bit length of one signature: L * log2(q)."""
        return self.L * math.log2(self.q)

    def sum_table(self) -> dict[tuple[int, ...], frozenset[int]]:
        """Received sum -> transmitter set, for all subsets of size <= K."""
        if self._sum_table is None:
            table: dict[tuple[int, ...], frozenset[int]] = {}
            for size in range(self.K + 1):
                for subset in combinations(range(self.M), size):
                    table[_sum_words(self.codewords, subset, self.q, self.L)] = frozenset(subset)
            self._sum_table = table
        return self._sum_table


def _sum_words(
    codewords: tuple[tuple[int, ...], ...], subset: Iterable[int], q: int, length: int
) -> tuple[int, ...]:
    total = [0] * length
    for m in subset:
        word = codewords[m]
        for i in range(length):
            total[i] = (total[i] + word[i]) % q
    return tuple(total)


def benchmark_length_bits(m: int, k: int) -> float | None:
    """Classical achievable bit length log2(M)*(K/(1 - log2(K)/log2(M)) + 1).

    A reporting benchmark only; the randomized constructor does not claim to
    attain it.  Undefined (returns None) when K >= M, where the denominator
    is nonpositive.
    """
    if m < 2 or k < 1:
        raise ValueError(f"need M >= 2 and K >= 1, got M={m!r}, K={k!r}")
    if k >= m:
        return None
    log_m = math.log2(m)
    log_k = math.log2(k)
    return log_m * (k / (1.0 - log_k / log_m) + 1.0)


def _try_build(
    rng: np.random.Generator, m: int, k: int, q: int, length: int, word_tries: int
) -> tuple[tuple[int, ...], ...] | None:
    """One attempt: draw words one at a time, checking sums incrementally.

    sums_by_size[s] holds every size-s subset sum seen so far.  Sums of
    different sizes can never collide (coordinate 0 equals the size mod q and
    sizes <= M < q), so only within-size collisions are checked.
    """
    sums_by_size: list[set[tuple[int, ...]]] = [set() for _ in range(k + 1)]
    sums_by_size[0].add(tuple([0] * length))
    words: list[tuple[int, ...]] = []
    for _ in range(m):
        placed = False
        for _ in range(word_tries):
            tail = rng.integers(0, q, size=length - 1)
            w = (1, *map(int, tail))
            new_sums: list[tuple[int, tuple[int, ...]]] = []
            ok = True
            for size in range(min(len(words), k - 1), -1, -1):
                for total in sums_by_size[size]:
                    s = tuple((a + b) % q for a, b in zip(total, w))
                    if s in sums_by_size[size + 1]:
                        ok = False
                        break
                    new_sums.append((size + 1, s))
                if not ok:
                    break
            if not ok:
                continue
            # the candidate's new sums must not collide among themselves
            seen: set[tuple[int, ...]] = set()
            for _, s in new_sums:
                if s in seen:
                    ok = False
                    break
                seen.add(s)
            if not ok:
                continue
            for size, s in new_sums:
                sums_by_size[size].add(s)
            words.append(w)
            placed = True
            break
        if not placed:
            return None
    return tuple(words)


def construct_codebook(
    m: int,
    k: int,
    q_field: int,
    seed: int | None = None,
    attempts_per_length: int = 60,
    max_length: int = 16,
    word_tries: int = 100,
) -> Codebook:
    """Search for a codebook with the unique-sum and multiplicity properties.

    Tries increasing lengths L; at each L runs up to attempts_per_length
    randomized builds, each verified exhaustively before being returned.
    Raises ConstructionError when the budget runs out, which means "not
    found", not "does not exist".

    seed=None draws fresh entropy; either way the winning seed is recorded on
    the returned Codebook so the build is reproducible.
    """
    if int(m) != m or m < 2:
        raise ValueError(f"M must be an integer >= 2, got {m!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    if int(q_field) != q_field or not _is_prime(int(q_field)):
        raise ValueError(
            f"q_field must be prime (prime-power extension fields unsupported), got {q_field!r}"
        )
    m, k, q_field = int(m), int(k), int(q_field)
    if q_field <= m:
        raise ValueError(f"need q_field > M for exact multiplicity, got q={q_field}, M={m}")
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
    rng = np.random.Generator(np.random.Philox(seed))

    k_eff = min(k, m)
    for length in range(2, max_length + 1):
        # q^(L-1) free symbols must at least distinguish all M words
        if (length - 1) * math.log(q_field) < math.log(m):
            continue
        for _ in range(attempts_per_length):
            words = _try_build(rng, m, k_eff, q_field, length, word_tries)
            if words is None:
                continue
            book = Codebook(M=m, K=k, q=q_field, L=length, codewords=words, search_seed=seed)
            if not verify_codebook(book):
                return book
    raise ConstructionError(
        f"no codebook found for M={m}, K={k}, q={q_field} within "
        f"L <= {max_length} and {attempts_per_length} attempts per length "
        "(search exhausted; existence not ruled out)"
    )


def verify_codebook(book: Codebook) -> list[str]:
    """Exhaustive invariant check; returns violation messages (empty = valid).

    Recomputes every subset sum of size <= K from scratch, independently of
    the incremental bookkeeping used during construction.
    """
    problems: list[str] = []
    if not _is_prime(book.q):
        problems.append(f"field size {book.q} is not prime")
    if book.q <= book.M:
        problems.append(f"q={book.q} must exceed M={book.M} for exact multiplicity")
    if len(book.codewords) != book.M:
        problems.append(f"expected {book.M} codewords, found {len(book.codewords)}")
    for idx, w in enumerate(book.codewords):
        if len(w) != book.L:
            problems.append(f"codeword {idx} has length {len(w)}, expected {book.L}")
        if any(int(s) != s or not 0 <= s < book.q for s in w):
            problems.append(f"codeword {idx} has symbols outside F_{book.q}")
        if len(w) > 0 and w[0] != 1:
            problems.append(f"codeword {idx} coordinate 0 is {w[0]}, expected 1")
    if problems:
        return problems
    if len(set(book.codewords)) != book.M:
        problems.append("codewords are not all distinct")
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    k_eff = min(book.K, book.M)
    for size in range(k_eff + 1):
        for subset in combinations(range(book.M), size):
            s = _sum_words(book.codewords, subset, book.q, book.L)
            if s in seen:
                problems.append(
                    f"subsets {seen[s]} and {subset} produce the same sum {s}"
                )
            else:
                seen[s] = subset
    return problems


def adder_channel(book: Codebook, transmitters: Iterable[int]) -> tuple[int, ...]:
    """Symbol-wise F_q sum of the selected codewords; empty set -> zeros.

    Each user transmits at most once: duplicate indices are rejected.
    """
    tx = list(transmitters)
    if len(set(tx)) != len(tx):
        raise ValueError(f"duplicate transmitter indices in {tx!r}")
    for m in tx:
        if int(m) != m or not 0 <= m < book.M:
            raise ValueError(f"transmitter index {m!r} outside 0..{book.M - 1}")
    return _sum_words(book.codewords, [int(m) for m in tx], book.q, book.L)


def decode(
    book: Codebook, received: tuple[int, ...]
) -> tuple[int, frozenset[int] | None]:
    """Recover (multiplicity, transmitter set) from a received sum.

    Multiplicity is coordinate 0 of the sum, exact for any count <= M.  For
    multiplicity <= K the unique matching subset is returned; above K the
    identities are undecodable and the set is None.  A word that matches no
    valid sum raises IntegrityError: impossible on a noiseless channel, so it
    signals codebook corruption.
    """
    received = tuple(int(s) for s in received)
    if len(received) != book.L:
        raise ValueError(f"received length {len(received)}, expected {book.L}")
    if any(not 0 <= s < book.q for s in received):
        raise ValueError(f"received symbols outside F_{book.q}: {received!r}")
    multiplicity = received[0]
    if multiplicity > book.M:
        raise IntegrityError(
            f"multiplicity coordinate reads {multiplicity} > M={book.M}"
        )
    if multiplicity > book.K:
        return multiplicity, None
    users = book.sum_table().get(received)
    if users is None:
        raise IntegrityError(
            f"received word {received!r} matches no sum of {multiplicity} codewords"
        )
    return multiplicity, users


def codebook_to_dict(book: Codebook, meta: dict | None = None) -> dict:
    """JSON-ready dict {M, K, q, L, codewords} (+ optional meta block)."""
    out = {
        "M": book.M,
        "K": book.K,
        "q": book.q,
        "L": book.L,
        "codewords": [list(w) for w in book.codewords],
    }
    if meta is not None:
        out["meta"] = meta
    return out


def codebook_from_dict(data: dict) -> Codebook:
    """Inverse of codebook_to_dict; any 'meta' block is ignored.

    Shape errors raise ValueError; semantic violations are left to
    verify_codebook.
    """
    try:
        m = int(data["M"])
        k = int(data["K"])
        q = int(data["q"])
        length = int(data["L"])
        words = tuple(tuple(int(s) for s in w) for w in data["codewords"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed codebook JSON: {exc}") from exc
    return Codebook(M=m, K=k, q=q, L=length, codewords=words)
