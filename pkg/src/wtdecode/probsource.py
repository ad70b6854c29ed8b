"""Conditional next-token distributions: tabular, additively smoothed n-gram, uniform.

All models are immutable once built and keep probabilities in natural-log
space; `next_dist` exponentiates at the boundary. Reference tables used
throughout the tests ship as `theorem1_table`, `garden_table`, and
`nonmono_table`.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .errors import ModelFileError, UnknownTokenError, ValidationError
from .vocab import Vocabulary

SUM_TOL = 1e-12


def _log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


class ConditionalModel:
    """Base class: a vocabulary plus next-token distributions given a token prefix.

    Subclasses implement `_logdist_for_key`. `context_order` is the number of
    trailing context tokens the model actually conditions on; it lets the word
    enumerator collapse equivalent contexts into a finite state machine.
    """

    vocab: Vocabulary
    context_order: int

    def context_key(self, ctx) -> tuple[int, ...]:
        ctx = tuple(ctx)
        if self.context_order == 0:
            return ()
        return ctx[-self.context_order:] if len(ctx) > self.context_order else ctx

    def _logdist_for_key(self, key: tuple[int, ...]) -> np.ndarray:
        raise NotImplementedError

    def _check_ctx(self, ctx) -> tuple[int, ...]:
        ctx = tuple(ctx)
        n = len(self.vocab)
        for t in ctx:
            if not 0 <= t < n:
                raise UnknownTokenError(t)
        return ctx

    def next_logdist(self, ctx) -> np.ndarray:
        return self._logdist_for_key(self.context_key(self._check_ctx(ctx)))

    def next_dist(self, ctx) -> np.ndarray:
        return np.exp(self.next_logdist(ctx))

    def b_logmass(self, ctx) -> float:
        logdist = self.next_logdist(ctx)
        return float(logsumexp(logdist[list(self.vocab.b_ids)]))

    def b_mass(self, ctx) -> float:
        return float(np.exp(self.b_logmass(ctx)))

    def max_i_mass(self) -> float | None:
        """Upper bound on P(next token is class I) over all contexts, if known."""
        return None


def _validate_dist(p: np.ndarray, where: str) -> None:
    if np.any(p < 0):
        raise ValidationError(f"{where}: negative probability")
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{where}: probabilities sum to {total!r}, not 1")


class TabularModel(ConditionalModel):
    """Explicit context → distribution table with a default row for unlisted contexts.

    Context keys are the last `order` tokens of the prefix (the whole prefix
    when shorter), so the table is total over arbitrarily long contexts.
    """

    def __init__(self, vocab: Vocabulary, rows, default=None, order: int = 1):
        if order < 0:
            raise ValidationError(f"order must be >= 0, got {order}")
        self.vocab = vocab
        self.context_order = order
        self._table: dict[tuple[int, ...], np.ndarray] = {}
        for ctx_surfaces, dist in rows.items():
            key = vocab.encode(ctx_surfaces)
            if len(key) > order:
                raise ValidationError(f"context {ctx_surfaces!r} longer than order {order}")
            vec = self._dist_vector(dist, f"context {ctx_surfaces!r}")
            self._table[key] = _log(vec)
        if default is None:
            vec = np.full(len(vocab), 1.0 / len(vocab))
        else:
            vec = self._dist_vector(default, "default row")
        self._default = _log(vec)

    def _dist_vector(self, dist, where: str) -> np.ndarray:
        vec = np.zeros(len(self.vocab))
        for surface, p in dist.items():
            vec[self.vocab.id_of(surface)] = p
        _validate_dist(vec, where)
        return vec

    def _logdist_for_key(self, key):
        return self._table.get(key, self._default)

    def max_i_mass(self) -> float:
        i_ids = list(self.vocab.i_ids)
        if not i_ids:
            return 0.0
        rows = list(self._table.values()) + [self._default]
        return max(float(np.exp(logsumexp(row[i_ids]))) for row in rows)

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"#order={self.context_order}\n")
            f.write(f"#marker={self.vocab.marker}\n")
            f.write(f"#default={_format_dist(np.exp(self._default), self.vocab)}\n")
            for key in sorted(self._table, key=lambda k: (len(k), k)):
                ctx = " ".join(self.vocab.decode(key)) if key else "ε"
                f.write(f"{ctx}\t{_format_dist(np.exp(self._table[key]), self.vocab)}\n")

    @classmethod
    def from_file(cls, path) -> "TabularModel":
        order = None
        marker = "▁"
        default_spec = None
        raw_rows = []
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            raise ModelFileError(f"cannot open model file {path}: {e}") from None
        with f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#order="):
                    order = int(line[len("#order="):])
                elif line.startswith("#marker="):
                    marker = line[len("#marker="):]
                elif line.startswith("#default="):
                    default_spec = line[len("#default="):]
                elif line.startswith("#"):
                    continue
                else:
                    parts = line.split("\t")
                    if len(parts) != 2:
                        raise ModelFileError(f"{path}:{lineno}: expected '<ctx>\\t<dist>'")
                    raw_rows.append((lineno, parts[0], parts[1]))
        if order is None:
            raise ModelFileError(f"{path}: missing '#order=' header")

        surfaces = []

        def note(surface):
            if surface not in surfaces:
                surfaces.append(surface)

        parsed = []
        for lineno, ctx_text, dist_text in raw_rows:
            ctx = () if ctx_text == "ε" else tuple(ctx_text.split(" "))
            for s in ctx:
                note(s)
            dist = _parse_dist(dist_text, f"{path}:{lineno}")
            for s in dist:
                note(s)
            parsed.append((ctx, dist))
        default = None
        if default_spec is not None:
            default = _parse_dist(default_spec, f"{path}: default")
            for s in default:
                note(s)

        vocab = Vocabulary(surfaces, marker=marker)
        try:
            return cls(vocab, dict(parsed), default=default, order=order)
        except ValidationError as e:
            raise ModelFileError(f"{path}: {e}") from None


def _format_dist(vec: np.ndarray, vocab: Vocabulary) -> str:
    parts = []
    for tid, p in enumerate(vec):
        if p > 0:
            parts.append(f"{vocab.surface_of(tid)}:{float(p)!r}")
    return ",".join(parts)


def _parse_dist(text: str, where: str) -> dict[str, float]:
    dist = {}
    for item in text.split(","):
        if ":" not in item:
            raise ModelFileError(f"{where}: expected '<token>:<prob>', got {item!r}")
        surface, _, p = item.rpartition(":")
        try:
            dist[surface] = float(p)
        except ValueError:
            raise ModelFileError(f"{where}: bad probability {p!r}") from None
    return dist


class UniformModel(ConditionalModel):
    """Every context yields the exact uniform distribution."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.context_order = 0
        self._logdist = _log(np.full(len(vocab), 1.0 / len(vocab)))

    def _logdist_for_key(self, key):
        return self._logdist

    def max_i_mass(self) -> float:
        return len(self.vocab.i_ids) / len(self.vocab)


class NGramModel(ConditionalModel):
    """Additively smoothed n-gram model of order k (conditions on k-1 tokens).

    P(j | c) = (count(c, j) + alpha) / (count(c) + alpha * |V|). Count tables
    are kept for every context length 0..k-1 so short prefixes near a sequence
    start are first-class rather than padded.
    """

    def __init__(self, vocab: Vocabulary, order: int, alpha: float, counts):
        if order < 1:
            raise ValidationError(f"order must be >= 1, got {order}")
        if alpha <= 0:
            raise ValidationError(f"alpha must be > 0, got {alpha}")
        self.vocab = vocab
        self.order = order
        self.alpha = alpha
        self.context_order = order - 1
        self._counts = {tuple(k): np.asarray(v, dtype=float) for k, v in counts.items()}
        self._cache: dict[tuple[int, ...], np.ndarray] = {}

    def context_key(self, ctx):
        ctx = tuple(ctx)
        keep = min(len(ctx), self.context_order)
        return ctx[len(ctx) - keep:]

    def _logdist_for_key(self, key):
        cached = self._cache.get(key)
        if cached is None:
            vec = self._counts.get(key)
            if vec is None:
                vec = np.zeros(len(self.vocab))
            smoothed = (vec + self.alpha) / (vec.sum() + self.alpha * len(self.vocab))
            cached = self._cache[key] = _log(smoothed)
        return cached

    def max_i_mass(self) -> float:
        i_ids = list(self.vocab.i_ids)
        if not i_ids:
            return 0.0
        n = len(self.vocab)
        best = len(i_ids) / n  # unseen contexts fall back to the uniform row
        for vec in self._counts.values():
            smoothed = (vec + self.alpha) / (vec.sum() + self.alpha * n)
            best = max(best, float(smoothed[i_ids].sum()))
        return best

    def to_file(self, path) -> None:
        import json

        payload = {
            "order": self.order,
            "alpha": self.alpha,
            "marker": self.vocab.marker,
            "surfaces": list(self.vocab.surfaces),
            "counts": [
                [list(self.vocab.decode(key)), vec.tolist()]
                for key, vec in sorted(self._counts.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
            f.write("\n")

    @classmethod
    def from_file(cls, path) -> "NGramModel":
        import json

        try:
            with open(path, encoding="utf-8") as f:
                payload = json.load(f)
        except OSError as e:
            raise ModelFileError(f"cannot open model file {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ModelFileError(f"{path}: not a JSON n-gram model: {e}") from None
        vocab = Vocabulary(payload["surfaces"], marker=payload.get("marker", "▁"))
        counts = {vocab.encode(ctx): vec for ctx, vec in payload["counts"]}
        return cls(vocab, payload["order"], payload["alpha"], counts)


def train_ngram(vocab: Vocabulary, corpus, order: int, alpha: float) -> NGramModel:
    """Count-train a smoothed n-gram model from token-id sequences."""
    sequences = [tuple(seq) for seq in corpus]
    if not sequences or all(len(s) == 0 for s in sequences):
        raise ValidationError("empty training corpus")
    if order < 1:
        raise ValidationError(f"order must be >= 1, got {order}")
    counts: dict[tuple[int, ...], np.ndarray] = {}
    n = len(vocab)
    for seq in sequences:
        for t in seq:
            if not 0 <= t < n:
                raise UnknownTokenError(t)
        for length in range(order):
            for i in range(length, len(seq)):
                key = seq[i - length:i]
                vec = counts.get(key)
                if vec is None:
                    vec = counts[key] = np.zeros(n)
                vec[seq[i]] += 1
    return NGramModel(vocab, order, alpha, counts)


def theorem1_table() -> TabularModel:
    """Degenerate two-token model whose word probabilities sum to 2 over depth 2."""
    vocab = Vocabulary(["▁j1", "j2"])
    rows = {
        (): {"▁j1": 1.0, "j2": 0.0},
        ("▁j1",): {"▁j1": 0.0, "j2": 1.0},
        ("▁j1", "j2"): {"▁j1": 1.0, "j2": 0.0},
    }
    return TabularModel(vocab, rows, order=2)


def garden_table() -> TabularModel:
    """Two-token model where leading-whitespace word mass diverges (toward 9) but
    trailing-whitespace word mass sums to 1."""
    vocab = Vocabulary(["▁a", "x"])
    rows = {(): {"▁a": 0.9, "x": 0.1}}
    return TabularModel(vocab, rows, default={"▁a": 0.1, "x": 0.9}, order=1)


def nonmono_table() -> TabularModel:
    """Model witnessing that a longer word can outscore its prefix under
    trailing-whitespace decoding: WT(▁a x) = 0.855 > WT(▁a) = 0.1."""
    vocab = Vocabulary(["▁a", "x"])
    rows = {
        (): {"▁a": 0.5, "x": 0.5},
        ("▁a",): {"▁a": 0.1, "x": 0.9},
        ("▁a", "x"): {"▁a": 0.95, "x": 0.05},
    }
    return TabularModel(vocab, rows, order=2)

BUILTIN_MODELS = {
    "theorem1": theorem1_table,
    "garden": garden_table,
    "nonmono": nonmono_table,
}


def random_tabular_model(rng, n_b: int = 2, n_i: int = 2, order: int = 1) -> TabularModel:
    """Random strictly positive tabular model over a small generated vocabulary.

    Lists a Dirichlet row for every context of length <= order, so enumeration
    never reaches the default row. Used by property tests and benchmarks.
    """
    surfaces = [f"▁b{k}" for k in range(n_b)] + [f"i{k}" for k in range(n_i)]
    vocab = Vocabulary(surfaces)
    n = len(surfaces)

    def rows_for_length(length):
        if length == 0:
            yield ()
            return
        from itertools import product

        yield from product(range(n), repeat=length)

    rows = {}
    for length in range(order + 1):
        for key in rows_for_length(length):
            probs = rng.dirichlet(np.ones(n))
            rows[vocab.decode(key)] = {surfaces[t]: float(probs[t]) for t in range(n)}
    return TabularModel(vocab, rows, order=order)
