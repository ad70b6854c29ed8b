"""Readers and row builders for the two exchange formats.

LogprobRecord JSONL is the boundary between real language models and this
toolkit: per-token natural-log probabilities plus, at every position 0..n, the
log marginal mass of boundary-class tokens. The RT corpus CSV carries one
reading-time observation per (subject, sentence, word).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

from .errors import AlignmentError, RecordError, ValidationError

_LOGP_SLACK = 1e-9   # float noise allowance for "logprob <= 0"
_MEMBER_SLACK = 1e-6  # reduced-precision exports: member vs marginal comparison


@dataclass(frozen=True)
class TokenLogprob:
    surface: str
    logp: float
    is_b: bool


@dataclass(frozen=True)
class LogprobRecord:
    sentence_id: str
    tokens: tuple[TokenLogprob, ...]
    b_mass_logps: tuple[float, ...]

    def validate(self) -> "LogprobRecord":
        where = f"record {self.sentence_id!r}"
        if not self.tokens:
            raise RecordError(f"{where}: tokens is empty")
        if len(self.b_mass_logps) != len(self.tokens) + 1:
            raise RecordError(
                f"{where}: b_mass_logps has {len(self.b_mass_logps)} entries, "
                f"expected token count + 1 = {len(self.tokens) + 1}"
            )
        for i, tok in enumerate(self.tokens):
            if not math.isfinite(tok.logp) or tok.logp > _LOGP_SLACK:
                raise RecordError(f"{where}: tokens[{i}].lp = {tok.logp!r} is not a logprob")
        for i, bm in enumerate(self.b_mass_logps):
            if not math.isfinite(bm) or bm > _LOGP_SLACK:
                raise RecordError(f"{where}: bm[{i}] = {bm!r} is not a logprob")
        # A class-B token's probability cannot exceed the class-B marginal in
        # the same position (checked wherever a word can start).
        for i, tok in enumerate(self.tokens):
            if tok.is_b and tok.logp > self.b_mass_logps[i] + _MEMBER_SLACK:
                raise RecordError(
                    f"{where}: tokens[{i}].lp = {tok.logp!r} exceeds the class-B "
                    f"marginal bm[{i}] = {self.b_mass_logps[i]!r}"
                )
        return self

    def to_json(self) -> str:
        return json.dumps({
            "sid": self.sentence_id,
            "tokens": [{"t": t.surface, "lp": t.logp, "b": t.is_b} for t in self.tokens],
            "bm": list(self.b_mass_logps),
        })

    @classmethod
    def from_json_dict(cls, obj, where: str = "record") -> "LogprobRecord":
        try:
            sid = obj["sid"]
            tokens = tuple(
                TokenLogprob(t["t"], min(float(t["lp"]), 0.0), bool(t["b"]))
                for t in obj["tokens"]
            )
            bm = tuple(min(float(v), 0.0) for v in obj["bm"])
        except (KeyError, TypeError) as e:
            raise RecordError(f"{where}: missing or malformed field: {e}") from None
        # Clamping above folds <= 1e-9 float noise into 0.0; anything larger
        # still fails validation because the raw value is checked first.
        for t in obj["tokens"]:
            if float(t["lp"]) > _LOGP_SLACK:
                raise RecordError(f"{where}: tokens lp = {t['lp']!r} is not a logprob")
        for v in obj["bm"]:
            if float(v) > _LOGP_SLACK:
                raise RecordError(f"{where}: bm = {v!r} is not a logprob")
        return cls(sid, tokens, bm).validate()


def read_records(path) -> list[LogprobRecord]:
    """Parse and validate a LogprobRecord JSONL file."""
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise RecordError(f"{path}:{lineno}: invalid JSON: {e}") from None
            records.append(LogprobRecord.from_json_dict(obj, where=f"{path}:{lineno}"))
    return records


def write_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record.to_json())
            f.write("\n")


@dataclass
class RTRow:
    subject: str
    item: str
    sentence_id: str
    word_index: int
    word: str
    rt: float | None
    length: int
    logfreq: float
    condition: str | None = None
    region: str | None = None
    slength: float | None = None
    pfix: float | None = None
    drop: bool = False
    sentence_len: int | None = field(default=None, compare=False)


_REQUIRED_RT_COLUMNS = ("subject", "item", "sid", "widx", "word", "rt", "length", "logfreq")


def read_rt_csv(path) -> list[RTRow]:
    """Read an RT corpus CSV; see the module docstring for the column contract."""
    rows = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED_RT_COLUMNS if c not in header]
        if missing:
            raise ValidationError(f"{path}: missing RT columns: {', '.join(missing)}")
        for lineno, rec in enumerate(reader, start=2):
            try:
                rt_text = (rec["rt"] or "").strip()
                row = RTRow(
                    subject=rec["subject"],
                    item=rec["item"],
                    sentence_id=rec["sid"],
                    word_index=int(rec["widx"]),
                    word=rec["word"],
                    rt=float(rt_text) if rt_text else None,
                    length=int(rec["length"]),
                    logfreq=float(rec["logfreq"]),
                    condition=rec.get("condition") or None,
                    region=rec.get("region") or None,
                    slength=float(rec["slength"]) if rec.get("slength") else None,
                    pfix=float(rec["pfix"]) if rec.get("pfix") else None,
                    drop=bool(int(rec["drop"])) if rec.get("drop") else False,
                )
            except (ValueError, KeyError) as e:
                raise ValidationError(f"{path}:{lineno}: {e}") from None
            if row.length < 1:
                raise ValidationError(f"{path}:{lineno}: length must be >= 1")
            rows.append(row)
    _assign_sentence_lengths(rows)
    return rows


def _assign_sentence_lengths(rows) -> None:
    max_idx: dict[str, int] = {}
    for row in rows:
        known = max_idx.get(row.sentence_id, -1)
        max_idx[row.sentence_id] = max(known, row.word_index)
    for row in rows:
        if row.sentence_len is None:
            row.sentence_len = max_idx[row.sentence_id] + 1


def filter_rt(rows, kind: str) -> list[RTRow]:
    """Apply the reading-time exclusion rules; idempotent, never raises.

    spr: drop RTs strictly below 100 ms or strictly above 3000 ms (and missing
    ones), plus sentence-initial and sentence-final words. gpd: drop unfixated
    words (missing or zero RT), boundary words, and rows pre-flagged for
    long-saccade exclusion via the drop column.
    """
    if kind not in ("spr", "gpd"):
        raise ValidationError(f"kind must be 'spr' or 'gpd', got {kind!r}")
    rows = list(rows)
    unset = [r for r in rows if r.sentence_len is None]
    if unset:
        _assign_sentence_lengths(rows)
    kept = []
    for row in rows:
        if row.word_index == 0 or row.word_index == row.sentence_len - 1:
            continue
        if kind == "spr":
            if row.rt is None or row.rt < 100.0 or row.rt > 3000.0:
                continue
        else:
            if row.rt is None or row.rt <= 0.0 or row.drop:
                continue
        kept.append(row)
    return kept


@dataclass
class RegressionRow:
    response: float | None
    surp: float
    surp_prev1: float
    surp_prev2: float
    freq: float
    freq_prev1: float
    freq_prev2: float
    length: float
    index: float
    miss_prev1: float
    miss_prev2: float
    subject: str
    item: str
    sentence_id: str
    word_index: int
    word: str
    condition: str | None = None
    region: str | None = None
    slength: float | None = None
    pfix: float | None = None


def build_rows(scores, rt_rows, variant: str = "wl", transform: str = "identity",
               predictor_rows=None, impute_value: float = 0.0) -> list[RegressionRow]:
    """Join scored sentences with RT rows into regression-ready rows.

    `scores` maps sentence id to a SentenceScore; `variant` picks which
    surprisal ("wl" or "wt") fills the surp columns. Spillover predictors are
    lagged within the sentence; at sentence starts they are imputed to
    `impute_value` with per-lag 0/1 missing-indicator columns, which makes the
    fit invariant to the imputation constant. `predictor_rows`, when given,
    supplies frequency lookups for lag words whose own RT rows were filtered
    out (defaults to rt_rows).
    """
    if variant not in ("wl", "wt"):
        raise ValidationError(f"variant must be 'wl' or 'wt', got {variant!r}")
    if transform not in ("identity", "log"):
        raise ValidationError(f"transform must be 'identity' or 'log', got {transform!r}")

    freq_map: dict[tuple[str, int], float] = {}
    for row in (predictor_rows if predictor_rows is not None else rt_rows):
        freq_map[(row.sentence_id, row.word_index)] = row.logfreq

    def pick(word):
        return word.wl_surprisal if variant == "wl" else word.wt_surprisal

    out = []
    for row in sorted(rt_rows, key=lambda r: (r.sentence_id, r.word_index, r.subject, r.item)):
        score = scores.get(row.sentence_id)
        if score is None:
            raise AlignmentError(f"no scored sentence for sid {row.sentence_id!r}")
        if row.word_index >= len(score.words):
            raise AlignmentError(
                f"sid {row.sentence_id!r}: word index {row.word_index} out of range "
                f"({len(score.words)} scored words)"
            )
        word = score.words[row.word_index]
        if word.surface != row.word:
            raise AlignmentError(
                f"sid {row.sentence_id!r} index {row.word_index}: RT word {row.word!r} "
                f"does not match scored word {word.surface!r}"
            )

        lag_surp = []
        lag_freq = []
        miss = []
        for lag in (1, 2):
            j = row.word_index - lag
            if j < 0:
                lag_surp.append(impute_value)
                lag_freq.append(impute_value)
                miss.append(1.0)
            else:
                lag_surp.append(pick(score.words[j]))
                key = (row.sentence_id, j)
                if key not in freq_map:
                    raise AlignmentError(
                        f"sid {row.sentence_id!r}: no frequency row for lag word at index {j}"
                    )
                lag_freq.append(freq_map[key])
                miss.append(0.0)

        if row.rt is None:
            response = None
        elif transform == "log":
            if row.rt <= 0:
                raise ValidationError(f"cannot log-transform nonpositive RT {row.rt!r}")
            response = math.log(row.rt)
        else:
            response = row.rt

        out.append(RegressionRow(
            response=response,
            surp=pick(word),
            surp_prev1=lag_surp[0],
            surp_prev2=lag_surp[1],
            freq=row.logfreq,
            freq_prev1=lag_freq[0],
            freq_prev2=lag_freq[1],
            length=float(row.length),
            index=float(row.word_index),
            miss_prev1=miss[0],
            miss_prev2=miss[1],
            subject=row.subject,
            item=row.item,
            sentence_id=row.sentence_id,
            word_index=row.word_index,
            word=row.word,
            condition=row.condition,
            region=row.region,
            slength=row.slength,
            pfix=row.pfix,
        ))
    return out


def write_rt_csv(rows, path) -> None:
    """Write RT rows back out in the corpus CSV contract."""
    rows = list(rows)
    optional = [c for c in ("condition", "region", "slength", "pfix")
                if any(getattr(r, c) is not None for r in rows)]
    if any(r.drop for r in rows):
        optional.append("drop")
    header = list(_REQUIRED_RT_COLUMNS) + optional
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for r in rows:
            base = [r.subject, r.item, r.sentence_id, r.word_index, r.word,
                    repr(r.rt) if r.rt is not None else "", r.length, repr(r.logfreq)]
            for c in optional:
                if c == "drop":
                    base.append(int(r.drop))
                else:
                    v = getattr(r, c)
                    base.append("" if v is None else v)
            writer.writerow(base)


def logfreq_from_counts(counts) -> dict[str, float]:
    """Natural-log (count + 1) per million tokens, from a word -> count mapping."""
    total = sum(counts.values())
    if total <= 0:
        raise ValidationError("unigram counts are empty")
    return {w: math.log((c + 1) / total * 1e6) for w, c in counts.items()}


def read_unigram_counts(path) -> dict[str, int]:
    counts: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected '<word> <count>'")
            try:
                counts[parts[0]] = counts.get(parts[0], 0) + int(parts[1])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad count {parts[1]!r}") from None
    return counts
