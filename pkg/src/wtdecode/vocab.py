"""Subword vocabularies with a boundary/internal partition, and word segmentation.

A token whose surface begins with the whitespace marker starts a new
whitespace-delimited word (class B); every other token continues the current
word (class I). The one exception is the first token of a sequence, which may
be class I and still opens the first word, matching how real tokenizers emit
sequence-initial tokens without a leading space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TokenizeError, UnknownTokenError, VocabError

DEFAULT_MARKER = "▁"  # "▁"

CLASS_B = "B"
CLASS_I = "I"


class Vocabulary:
    """Immutable token inventory partitioned into boundary (B) and internal (I) classes."""

    def __init__(self, surfaces, marker: str = DEFAULT_MARKER):
        if len(marker) != 1:
            raise VocabError(f"whitespace marker must be a single character, got {marker!r}")
        surfaces = list(surfaces)
        if len(set(surfaces)) != len(surfaces):
            dupes = sorted({s for s in surfaces if surfaces.count(s) > 1})
            raise VocabError(f"duplicate surfaces: {dupes}")
        self.marker = marker
        self.surfaces = tuple(surfaces)
        self._ids = {s: i for i, s in enumerate(self.surfaces)}
        self._is_b = tuple(s.startswith(marker) for s in self.surfaces)
        self.b_ids = tuple(i for i, b in enumerate(self._is_b) if b)
        self.i_ids = tuple(i for i, b in enumerate(self._is_b) if not b)
        if not self.b_ids:
            raise VocabError("vocabulary has no boundary (class B) tokens")

    def __len__(self):
        return len(self.surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._ids

    def id_of(self, surface: str) -> int:
        try:
            return self._ids[surface]
        except KeyError:
            raise UnknownTokenError(surface) from None

    def surface_of(self, token_id: int) -> str:
        return self.surfaces[token_id]

    def is_b(self, token_id: int) -> bool:
        return self._is_b[token_id]

    def classify(self, surface: str) -> str:
        """Return "B" or "I" for a vocabulary surface; unknown surfaces raise."""
        return CLASS_B if self._is_b[self.id_of(surface)] else CLASS_I

    def encode(self, surfaces) -> tuple[int, ...]:
        return tuple(self.id_of(s) for s in surfaces)

    def decode(self, token_ids) -> tuple[str, ...]:
        return tuple(self.surfaces[t] for t in token_ids)

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"#marker={self.marker}\n")
            for tid, surface in enumerate(self.surfaces):
                cls = CLASS_B if self._is_b[tid] else CLASS_I
                f.write(f"{surface}\t{cls}\n")

    @classmethod
    def from_file(cls, path) -> "Vocabulary":
        marker = DEFAULT_MARKER
        surfaces = []
        classes = []
        with open(path, encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#marker="):
                    marker = line[len("#marker="):]
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or parts[1] not in (CLASS_B, CLASS_I):
                    raise VocabError(f"{path}:{lineno}: expected '<surface>\\t<B|I>', got {line!r}")
                surfaces.append(parts[0])
                classes.append(parts[1])
        vocab = cls(surfaces, marker=marker)
        for surface, declared in zip(surfaces, classes):
            if vocab.classify(surface) != declared:
                raise VocabError(
                    f"{path}: token {surface!r} declared {declared} but its surface implies "
                    f"{vocab.classify(surface)} (marker {marker!r})"
                )
        return vocab


@dataclass(frozen=True)
class Segmentation:
    """A token sequence tiled into whitespace-word spans (start, end)."""

    token_ids: tuple[int, ...]
    spans: tuple[tuple[int, int], ...]
    vocab: Vocabulary = field(repr=False)

    def __post_init__(self):
        if not self.token_ids:
            raise VocabError("empty token sequence")
        pos = 0
        for start, end in self.spans:
            if start != pos or end <= start:
                raise VocabError(f"spans do not tile the sequence: {self.spans}")
            pos = end
        if pos != len(self.token_ids):
            raise VocabError(f"spans do not cover the sequence: {self.spans}")
        for start, end in self.spans:
            if start > 0 and not self.vocab.is_b(self.token_ids[start]):
                raise VocabError(f"non-initial span at {start} starts with a class-I token")
            for i in range(start + 1, end):
                if self.vocab.is_b(self.token_ids[i]):
                    raise VocabError(f"class-B token inside a span at position {i}")

    @property
    def surfaces(self) -> tuple[str, ...]:
        return self.vocab.decode(self.token_ids)

    def word_surfaces(self) -> tuple[str, ...]:
        out = []
        for start, end in self.spans:
            joined = "".join(self.vocab.surfaces[t] for t in self.token_ids[start:end])
            out.append(joined.replace(self.vocab.marker, " ").strip())
        return tuple(out)

    def detokenize(self) -> str:
        joined = "".join(self.vocab.surfaces[t] for t in self.token_ids)
        return joined.replace(self.vocab.marker, " ")


def spans_from_flags(is_b) -> tuple[tuple[int, int], ...]:
    """Word spans for a sequence of B/I flags: a span opens at 0 and at every B token."""
    flags = list(is_b)
    if not flags:
        raise VocabError("empty token sequence")
    starts = [0] + [i for i in range(1, len(flags)) if flags[i]]
    ends = starts[1:] + [len(flags)]
    return tuple(zip(starts, ends))


def segment_words(token_ids, vocab: Vocabulary) -> Segmentation:
    """Segment classified tokens into words. Total on any nonempty sequence."""
    token_ids = tuple(token_ids)
    spans = spans_from_flags([vocab.is_b(t) for t in token_ids])
    return Segmentation(token_ids, spans, vocab)


def tokenize_greedy(text: str, vocab: Vocabulary) -> Segmentation:
    """Leftmost-longest tokenization of text against the vocabulary surfaces.

    Spaces in the input are rewritten to the whitespace marker before matching,
    so " a" can match a "▁a" entry. Raises TokenizeError with the offset of the
    first position where no surface matches.
    """
    marked = text.replace(" ", vocab.marker)
    max_len = max((len(s) for s in vocab.surfaces), default=0)
    token_ids = []
    pos = 0
    while pos < len(marked):
        for length in range(min(max_len, len(marked) - pos), 0, -1):
            candidate = marked[pos:pos + length]
            if candidate in vocab:
                token_ids.append(vocab.id_of(candidate))
                pos += length
                break
        else:
            raise TokenizeError(text, pos)
    return segment_words(token_ids, vocab)
