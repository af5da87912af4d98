"""DNA reads, synthetic datasets, overlap scoring and layout fitness.

The layout stage treats a set of reads as a permutation problem: the score of
an ordering is the sum of suffix/prefix overlap lengths between adjacent
fragments, and higher is better.
"""

from __future__ import annotations

import gzip
import sys
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, Sequence, TextIO

import numpy as np

from .errors import ContractViolation, ParseError, ShearError
from .stochastic import RngStream

ALPHABET = frozenset("ACGTN")


@dataclass(frozen=True)
class Fragment:
    """One sequencing read: a non-empty string over {A, C, G, T, N}."""

    id: int
    bases: str
    source_label: str | None = None

    def __post_init__(self) -> None:
        if not self.bases:
            raise ContractViolation(f"fragment {self.id}: empty sequence")
        if not set(self.bases) <= ALPHABET:
            bad = next(c for c in self.bases if c not in ALPHABET)
            raise ContractViolation(f"fragment {self.id}: invalid base {bad!r}")

    def __len__(self) -> int:
        return len(self.bases)


@dataclass(frozen=True)
class FragmentSet:
    """Ordered, immutable collection of fragments; ids are 0..D-1 in order."""

    fragments: tuple[Fragment, ...]

    def __post_init__(self) -> None:
        for i, frag in enumerate(self.fragments):
            if frag.id != i:
                raise ContractViolation(f"fragment id {frag.id} at position {i}")

    @classmethod
    def from_bases(
        cls, bases: Iterable[str], labels: Iterable[str | None] | None = None
    ) -> "FragmentSet":
        bases = list(bases)
        labels = list(labels) if labels is not None else [None] * len(bases)
        frags = tuple(
            Fragment(i, b.upper(), lab) for i, (b, lab) in enumerate(zip(bases, labels))
        )
        return cls(frags)

    @property
    def size(self) -> int:
        return len(self.fragments)

    def __len__(self) -> int:
        return len(self.fragments)

    def __iter__(self) -> Iterator[Fragment]:
        return iter(self.fragments)

    def __getitem__(self, i: int) -> Fragment:
        return self.fragments[i]


@dataclass(frozen=True)
class OverlapMatrix:
    """D x D table; cell (i, j) = longest suffix of read i equal to a prefix of read j.

    Diagonal cells are computed by the same rule as any pair but are never
    consulted by :func:`fitness` (a permutation has no self-adjacency).
    """

    cells: np.ndarray

    def __post_init__(self) -> None:
        c = self.cells
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ContractViolation(f"overlap matrix must be square, got {c.shape}")
        if (c < 0).any():
            raise ContractViolation("overlap matrix has negative entries")

    @property
    def dim(self) -> int:
        return self.cells.shape[0]


# ---------------------------------------------------------------------------
# parsing


def _bases_of(x: "Fragment | str") -> str:
    return x.bases if isinstance(x, Fragment) else x


def _validate_line(upper: str, raw: str, offset: int) -> None:
    if set(upper) <= ALPHABET:
        return
    for i, ch in enumerate(upper):
        if ch not in ALPHABET:
            raise ParseError(
                f"invalid symbol {raw[i]!r} at byte offset {offset + i}"
            )


def _iter_offset_lines(stream: BinaryIO) -> Iterator[tuple[int, str]]:
    offset = 0
    for raw in stream:
        yield offset, raw.decode("latin-1").rstrip("\r\n")
        offset += len(raw)


def iter_reads(stream: BinaryIO, fmt: str = "auto") -> Iterator[tuple[str | None, str]]:
    """Yield (label, uppercased bases) per record from a FASTA/FASTQ byte stream.

    fmt is "fasta", "fastq" or "auto" (detect from the first non-blank byte).
    FASTA sequences may span lines; FASTQ quality is read by length, so '@' in
    quality strings is handled. Raises ParseError on malformed input.
    """
    if fmt not in ("fasta", "fastq", "auto"):
        raise ContractViolation(f"unknown format {fmt!r}")
    lines = _iter_offset_lines(stream)

    first: tuple[int, str] | None = None
    for off, line in lines:
        if line:
            first = (off, line)
            break
    if first is None:
        raise ParseError("no fragments")

    if fmt == "auto":
        fmt = {">": "fasta", "@": "fastq"}.get(first[1][0], "")
        if fmt not in ("fasta", "fastq"):
            raise ParseError(
                f"cannot detect format from first byte {first[1][0]!r}"
            )

    if fmt == "fasta":
        yield from _iter_fasta(first, lines)
    else:
        yield from _iter_fastq(first, lines)


def _iter_fasta(first, lines) -> Iterator[tuple[str | None, str]]:
    off, line = first
    if not line.startswith(">"):
        raise ParseError(f"record 1: expected '>' header, got {line[0]!r}")
    label = line[1:].split(None, 1)[0] if line[1:].strip() else None
    parts: list[str] = []
    ordinal = 1
    for off, line in lines:
        if not line:
            continue
        if line.startswith(">"):
            if not parts:
                raise ParseError(f"record {ordinal}: empty sequence")
            yield label, "".join(parts)
            ordinal += 1
            label = line[1:].split(None, 1)[0] if line[1:].strip() else None
            parts = []
        else:
            upper = line.upper()
            _validate_line(upper, line, off)
            parts.append(upper)
    if not parts:
        raise ParseError(f"record {ordinal}: empty sequence")
    yield label, "".join(parts)


def _iter_fastq(first, lines) -> Iterator[tuple[str | None, str]]:
    ordinal = 0
    header: tuple[int, str] | None = first
    while header is not None:
        off, line = header
        ordinal += 1
        if not line.startswith("@"):
            raise ParseError(f"record {ordinal}: expected '@' header, got {line[0]!r}")
        label = line[1:].split(None, 1)[0] if line[1:].strip() else None

        seq_parts: list[str] = []
        sep_seen = False
        for off, line in lines:
            if not line:
                continue
            if line.startswith("+"):
                sep_seen = True
                break
            upper = line.upper()
            _validate_line(upper, line, off)
            seq_parts.append(upper)
        if not sep_seen:
            raise ParseError(f"record {ordinal}: missing '+' separator")
        seq = "".join(seq_parts)
        if not seq:
            raise ParseError(f"record {ordinal}: empty sequence")

        qual_len = 0
        for off, line in lines:
            if not line:
                continue
            qual_len += len(line)
            if qual_len >= len(seq):
                break
        if qual_len != len(seq):
            raise ParseError(
                f"record {ordinal}: quality length {qual_len} != sequence length {len(seq)}"
            )
        yield label, seq

        header = None
        for off, line in lines:
            if line:
                header = (off, line)
                break


def parse_reads(
    stream: BinaryIO, fmt: str = "auto", take: int | None = None
) -> FragmentSet:
    """Parse a FASTA/FASTQ byte stream into a FragmentSet.

    take limits the set to the first `take` records (streaming, early exit).
    """
    labels: list[str | None] = []
    bases: list[str] = []
    for label, seq in iter_reads(stream, fmt):
        if take is not None and len(bases) >= take:
            break
        labels.append(label)
        bases.append(seq)
    if not bases:
        raise ParseError("no fragments")
    return FragmentSet.from_bases(bases, labels)


def open_reads(path: str) -> BinaryIO:
    """Open a reads file for binary reading; '-' is stdin, '.gz' is gunzipped."""
    if path == "-":
        return sys.stdin.buffer
    if path.endswith(".gz"):
        return gzip.open(path, "rb")  # type: ignore[return-value]
    return open(path, "rb")


def read_fragments(path: str, fmt: str = "auto", take: int | None = None) -> FragmentSet:
    with open_reads(path) as stream:
        return parse_reads(stream, fmt, take)


def write_fasta(fragments: FragmentSet, handle: TextIO) -> None:
    for frag in fragments:
        handle.write(f">{frag.source_label or f'frag{frag.id}'}\n{frag.bases}\n")


# ---------------------------------------------------------------------------
# synthetic datasets


@dataclass(frozen=True)
class ShearResult:
    """Sheared reads in shuffled order plus the ground-truth layout."""

    fragments: FragmentSet
    true_order: list[int]
    seed: int


def shear_reference(
    reference: Fragment | str,
    fragment_count: int,
    mean_length: int,
    min_overlap: int,
    seed: int,
) -> ShearResult:
    """Cut a reference into overlapping tiles and return them shuffled.

    The tiles cover the reference left to right; consecutive tiles overlap by
    at least min_overlap bases, so the ground-truth ordering has layout
    fitness >= (D-1) * min_overlap. Deterministic for a given seed.
    """
    ref = _bases_of(reference)
    length = len(ref)
    d = fragment_count
    if d < 2:
        raise ShearError(f"fragment_count must be >= 2, got {d}")
    if min_overlap < 0:
        raise ShearError(f"min_overlap must be >= 0, got {min_overlap}")
    if not mean_length < length:
        raise ShearError(
            f"mean_length < len(reference) violated: {mean_length} >= {length}"
        )
    if not mean_length > min_overlap:
        raise ShearError(
            f"mean_length > min_overlap violated: {mean_length} <= {min_overlap}"
        )
    if d * mean_length < length + (d - 1) * min_overlap:
        raise ShearError(
            "coverage infeasible: fragment_count * mean_length >= "
            "len(reference) + (fragment_count - 1) * min_overlap violated: "
            f"{d * mean_length} < {length + (d - 1) * min_overlap}"
        )
    if length < d + min_overlap:
        raise ShearError(
            "reference too short for distinct tiles: "
            f"len(reference) >= fragment_count + min_overlap violated: "
            f"{length} < {d + min_overlap}"
        )

    rng = RngStream(seed)
    spread = max(1, mean_length // 4)
    len_hi = min(length, mean_length + spread)
    len_lo = max(1, min_overlap + 1, mean_length - spread)
    advance_max = len_hi - min_overlap

    tiles: list[tuple[int, int]] = []
    start = 0
    prev_end = 0
    prev_len = 0
    for i in range(d):
        remaining = d - 1 - i
        if i > 0:
            # overlap into this tile, capped so the chain can still reach the end
            o_hi = min(
                prev_len - 1,
                prev_end + len_hi - (length - remaining * advance_max),
            )
            o_in = int(rng.integers(min_overlap, o_hi + 1))
            start = prev_end - o_in
        else:
            o_in = 0
        hard_lo = max(1, o_in + 1, min_overlap + 1 if remaining > 0 else 1)
        if remaining > 0:
            end_lo = max(start + hard_lo, length - remaining * advance_max)
            end_hi = min(start + len_hi, length - remaining)
            # prefer lengths near mean_length when the window allows it
            pref_lo = max(end_lo, start + len_lo)
            if pref_lo <= end_hi:
                end_lo = pref_lo
            end = int(rng.integers(end_lo, end_hi + 1))
        else:
            end = length
        tiles.append((start, end))
        prev_end, prev_len = end, end - start

    order = rng.permutation(d)  # output slot j holds tile order[j]
    bases = [ref[tiles[k][0] : tiles[k][1]] for k in order]
    labels = [f"shear{j}_pos{tiles[k][0]}" for j, k in enumerate(order)]
    true_order = [int(x) for x in np.argsort(order)]
    return ShearResult(FragmentSet.from_bases(bases, labels), true_order, seed)


# ---------------------------------------------------------------------------
# overlap scoring


def overlap_len(a: Fragment | str, b: Fragment | str) -> int:
    """Longest L such that the last L bases of a equal the first L bases of b.

    Exact symbol match ('N' only matches 'N'); plain scan from the longest
    candidate down. Reference implementation for :func:`overlap_len_kmp`.
    """
    sa, sb = _bases_of(a), _bases_of(b)
    for ell in range(min(len(sa), len(sb)), 0, -1):
        if sa[len(sa) - ell :] == sb[:ell]:
            return ell
    return 0


def overlap_len_kmp(a: Fragment | str, b: Fragment | str) -> int:
    """Same value as :func:`overlap_len` in O(len(a) + len(b)).

    Runs the prefix function over b + sentinel + a; the final value is the
    longest prefix of b that is a suffix of a. The sentinel never matches a
    base, so the result cannot exceed min(len(a), len(b)).
    """
    sa, sb = _bases_of(a), _bases_of(b)
    s = sb + "\x00" + sa
    pi = [0] * len(s)
    k = 0
    for i in range(1, len(s)):
        while k and s[i] != s[k]:
            k = pi[k - 1]
        if s[i] == s[k]:
            k += 1
        pi[i] = k
    return pi[-1]


def build_overlap_matrix(fragments: FragmentSet, method: str = "kmp") -> OverlapMatrix:
    """All-pairs overlap table (D^2 scored pairs, order-independent)."""
    if fragments.size < 2:
        raise ContractViolation(f"need at least 2 fragments, got {fragments.size}")
    score = overlap_len_kmp if method == "kmp" else overlap_len
    d = fragments.size
    bases = [f.bases for f in fragments]
    cells = np.zeros((d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            cells[i, j] = score(bases[i], bases[j])
    return OverlapMatrix(cells)


def fitness(perm: Sequence[int] | np.ndarray, matrix: OverlapMatrix) -> int:
    """Layout score of an ordering: sum of adjacent-pair overlap lengths."""
    p = np.asarray(perm, dtype=np.int64)
    d = matrix.dim
    if (
        p.shape != (d,)
        or (p < 0).any()
        or (p >= d).any()
        or (np.bincount(p, minlength=d) != 1).any()
    ):
        raise ContractViolation("perm is not a permutation of 0..D-1")
    return int(matrix.cells[p[:-1], p[1:]].sum())
