import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

M = "▁"

WORDS = ["the", "a", "cat", "dog", "mat", "sat", "ran", "on", "in", "room",
         "turned", "left", "doctor", "after", "very", "dark"]
SUBWORDS = ["s", ",", ".", "ron"]


def build_tokenizer():
    pieces = [M + w for w in WORDS] + SUBWORDS
    chars = sorted({c for w in WORDS for c in w})
    vocab = [("<s>", 0.0), ("<unk>", -20.0)]
    vocab += [(p, -1.0) for p in pieces]
    seen = {p for p, _ in vocab}
    vocab += [(c, -10.0) for c in chars if c not in seen]
    vocab += [(M, -10.0)]
    tok = Tokenizer(models.Unigram(vocab, unk_id=1))
    tok.pre_tokenizer = pre_tokenizers.Metaspace(replacement=M, prepend_scheme="always")
    return PreTrainedTokenizerFast(tokenizer_object=tok, bos_token="<s>", unk_token="<unk>")


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly initialized causal LM saved locally, loadable by id."""
    path = tmp_path_factory.mktemp("tiny-lm")
    tokenizer = build_tokenizer()
    tokenizer.save_pretrained(path)
    torch.manual_seed(7)
    config = GPT2Config(
        vocab_size=len(tokenizer), n_positions=64, n_embd=32, n_layer=2, n_head=2,
        bos_token_id=tokenizer.bos_token_id, eos_token_id=tokenizer.bos_token_id,
    )
    GPT2LMHeadModel(config).save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def sentences_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("input") / "sentences.txt"
    path.write_text(
        "the cats sat on the mat\n"
        "a matron turned in the room\n"
        "after the doctor left the room, turned very dark\n"
        "the dogs ran in\n",
        encoding="utf-8",
    )
    return str(path)
