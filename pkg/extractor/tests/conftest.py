"""Shared fixture: a tiny randomly initialized BERT saved to disk once."""

import pytest

VOCAB = [
    "[PAD]",
    "[UNK]",
    "[CLS]",
    "[SEP]",
    "[MASK]",
    "the",
    "cat",
    "sat",
    "on",
    "mat",
    "bank",
    "river",
    "un",
    "##predict",
    "##able",
    "weather",
    "is",
    "here",
    "today",
    ".",
]

HIDDEN_SIZE = 32


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    import torch
    from transformers import BertConfig, BertModel, BertTokenizer

    root = tmp_path_factory.mktemp("tinybert")
    vocab_file = root / "vocab.txt"
    vocab_file.write_text("".join(word + "\n" for word in VOCAB), encoding="utf-8")
    tokenizer = BertTokenizer(str(vocab_file), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN_SIZE,
        num_hidden_layers=4,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(0)
    model = BertModel(config)
    model.eval()
    out = root / "model"
    tokenizer.save_pretrained(str(out))
    model.save_pretrained(str(out))
    return out
