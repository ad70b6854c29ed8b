"""Export per-token logprobs plus boundary-class marginal masses from a causal LM.

For every sentence the emitted record carries, at each position 0..n, the log
of the summed probability of all boundary-class vocabulary items (tokens whose
surface begins with the tokenizer's whitespace marker). Position 0 conditions
on the model's beginning-of-sequence token only; position n is the extra
post-final entry that trailing-whitespace rescaling needs. Everything is
computed from the model's own next-token distributions by masked log-sum-exp,
no model modifications.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer

WHITESPACE_MARKERS = ("▁", "Ġ")  # "▁" (sentencepiece-style), "Ġ" (byte-level BPE)

_CLAMP_SLACK = 1e-6  # masked logsumexp may exceed 0 by float noise, never more


class ExportError(Exception):
    pass


class ConfigurationError(ExportError):
    pass


@dataclass
class ExportSpec:
    model_id: str
    sentences_path: str
    output_path: str
    batch_size: int = 8
    vocab_out: str | None = None
    sid_prefix: str = "s"
    device: str = "cpu"


class Exporter:
    def __init__(self, model_id: str, device: str = "cpu"):
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id).to(device)
        self.model.eval()
        self.device = device

        vocab_size = self.model.get_input_embeddings().weight.shape[0]
        self.token_strings = self.tokenizer.convert_ids_to_tokens(list(range(vocab_size)))
        self.token_strings = [t if t is not None else "" for t in self.token_strings]
        self.marker = self._detect_marker()
        self.b_mask = torch.tensor(
            [t.startswith(self.marker) for t in self.token_strings], dtype=torch.bool,
            device=device,
        )
        if not bool(self.b_mask.any()):
            raise ConfigurationError("no boundary-class tokens under the detected marker")
        self.bos_id = self.tokenizer.bos_token_id
        if self.bos_id is None:
            self.bos_id = self.tokenizer.eos_token_id
        if self.bos_id is None:
            raise ConfigurationError(
                "tokenizer provides neither BOS nor EOS for sequence-initial conditioning"
            )

    def _detect_marker(self) -> str:
        for marker in WHITESPACE_MARKERS:
            if any(t.startswith(marker) for t in self.token_strings):
                return marker
        raise ConfigurationError(
            "cannot detect a whitespace-prefix convention in the tokenizer vocabulary "
            f"(looked for {WHITESPACE_MARKERS})"
        )

    def write_vocab(self, path) -> None:
        """Sidecar audit file in the toolkit's vocabulary format."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"#marker={self.marker}\n")
            for t, is_b in zip(self.token_strings, self.b_mask.tolist()):
                f.write(f"{t}\t{'B' if is_b else 'I'}\n")

    def encode(self, sentence: str) -> list[int]:
        ids = self.tokenizer.encode(sentence, add_special_tokens=False)
        if not ids:
            raise ExportError(f"sentence tokenized to nothing: {sentence!r}")
        for tid in ids:
            surface = self.token_strings[tid]
            if self.marker in surface[1:]:
                raise ExportError(
                    f"token {surface!r} carries an interior whitespace marker; "
                    "word boundaries are ambiguous for this sentence"
                )
        return ids

    @torch.no_grad()
    def score_batch(self, batch_ids: list[list[int]]):
        """Per-sentence (token logprobs, boundary-mass logprobs 0..n)."""
        lengths = [len(ids) for ids in batch_ids]
        width = max(lengths) + 1  # leading BOS
        input_ids = torch.zeros((len(batch_ids), width), dtype=torch.long, device=self.device)
        attention = torch.zeros_like(input_ids)
        for j, ids in enumerate(batch_ids):
            input_ids[j, 0] = self.bos_id
            input_ids[j, 1:1 + len(ids)] = torch.tensor(ids, dtype=torch.long)
            attention[j, :1 + len(ids)] = 1
        logits = self.model(input_ids=input_ids, attention_mask=attention).logits
        logprobs = torch.log_softmax(logits.to(torch.float64), dim=-1)

        out = []
        for j, ids in enumerate(batch_ids):
            n = lengths[j]
            rows = logprobs[j, :n + 1]                      # row i: after BOS + ids[:i]
            token_lps = rows[torch.arange(n), torch.tensor(ids)].tolist()
            bm = torch.logsumexp(rows[:, self.b_mask], dim=-1).tolist()
            out.append((
                [_clamped(lp) for lp in token_lps],
                [_clamped(v) for v in bm],
            ))
        return out

    def record(self, sentence_id: str, sentence: str) -> dict:
        ids = self.encode(sentence)
        (lps, bm), = self.score_batch([ids])
        return self.record_from_scores(sentence_id, ids, lps, bm)

    def record_from_scores(self, sentence_id, ids, lps, bm) -> dict:
        tokens = []
        for tid, lp in zip(ids, lps):
            surface = self.token_strings[tid]
            tokens.append({"t": surface, "lp": lp, "b": bool(self.b_mask[tid])})
        return {"sid": sentence_id, "tokens": tokens, "bm": bm}


def _clamped(value: float) -> float:
    if value > _CLAMP_SLACK:
        raise ExportError(f"log probability {value!r} is positive beyond float noise")
    return min(value, 0.0)


def export_records(spec: ExportSpec) -> int:
    """Run the export; returns the number of records written."""
    with open(spec.sentences_path, encoding="utf-8") as f:
        sentences = [line.rstrip("\n") for line in f if line.strip()]
    if not sentences:
        raise ExportError(f"no sentences in {spec.sentences_path}")

    exporter = Exporter(spec.model_id, device=spec.device)
    if spec.vocab_out:
        exporter.write_vocab(spec.vocab_out)

    written = 0
    with open(spec.output_path, "w", encoding="utf-8") as out:
        for start in range(0, len(sentences), spec.batch_size):
            chunk = sentences[start:start + spec.batch_size]
            encoded = [exporter.encode(s) for s in chunk]
            scored = exporter.score_batch(encoded)
            for offset, (lps, bm) in enumerate(scored):
                sid = f"{spec.sid_prefix}{start + offset:05d}"
                record = exporter.record_from_scores(sid, encoded[offset], lps, bm)
                out.write(json.dumps(record))
                out.write("\n")
                written += 1
    return written
