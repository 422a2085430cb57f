import json

import pytest
import torch

WORDS = [
    "coronavirus", "infection", "spreads", "between", "humans", "rapidly",
    "influenza", "vaccine", "trials", "show", "mixed", "results", "the",
    "study", "examines", "antibody", "response", "in", "patients", "cells",
    "protein", "binding", "was", "measured", "over", "time", "immunity",
]


@pytest.fixture(scope="session")
def tiny_model(tmp_path_factory):
    """A deterministic randomly-initialized BERT saved locally.

    Small enough for CPU tests and completely offline; the wordpiece vocab
    covers the fixture corpus so tokenization is stable.
    """
    from transformers import BertConfig, BertModel, BertTokenizerFast

    model_dir = tmp_path_factory.mktemp("tiny-bert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", ".", ",", "##s"] + WORDS
    (model_dir / "vocab.txt").write_text("\n".join(vocab), encoding="utf-8")
    torch.manual_seed(1234)
    model = BertModel(
        BertConfig(
            vocab_size=len(vocab),
            hidden_size=24,
            num_hidden_layers=2,
            num_attention_heads=2,
            intermediate_size=48,
            max_position_embeddings=128,
        )
    )
    tokenizer = BertTokenizerFast(
        vocab_file=str(model_dir / "vocab.txt"), do_lower_case=True, model_max_length=128
    )
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return str(model_dir)


def make_corpus(path, n_docs=10):
    """Write a JSONL corpus of n_docs with multi-sentence facets."""
    records = []
    for i in range(n_docs):
        records.append(
            {
                "id": f"doc{i:02d}",
                "title": f"Coronavirus study {i} shows antibody response.",
                "abstract": (
                    f"The study examines immunity in patients. "
                    f"Antibody response was measured over time. "
                    f"Infection spreads between humans rapidly in trial {i}."
                ),
                # every third doc has no fulltext facet
                "fulltext": (
                    "" if i % 3 == 2 else
                    f"Protein binding was measured. Vaccine trials show mixed results for cohort {i}."
                ),
            }
        )
    path.write_text(
        "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
    )
    return records
