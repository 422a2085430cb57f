"""Synthetic corpus/topic/qrel builders shared by CLI and acceptance tests."""

from __future__ import annotations

import json
import random

VOCAB = [
    "antibody", "protein", "virus", "infection", "immunity", "patient",
    "clinical", "trial", "vaccine", "symptom", "transmission", "mutation",
    "genome", "sample", "cohort", "therapy", "dosage", "receptor",
    "lung", "fever", "serum", "plasma", "antigen", "pathogen",
]


def _sentence(rng: random.Random, words: list[str], length: int) -> str:
    chosen = [rng.choice(words) for _ in range(length)]
    return chosen[0].capitalize() + " " + " ".join(chosen[1:]) + "."


def _passage(rng: random.Random, words: list[str], n_sentences: int) -> str:
    return " ".join(_sentence(rng, words, rng.randint(3, 7)) for _ in range(n_sentences))


def synth_corpus(n_docs: int, seed: int = 0, n_topics: int = 5):
    """Random corpus with planted topic signals.

    Topic t's signal words are f"signal{t}" and f"marker{t}"; documents
    relevant to t mix them into all facets. Returns (records, topics,
    qrels) where records is a list of dicts in the JSONL schema, topics a
    list of (number, query, question, narrative), and qrels a list of
    (topic, doc_id, grade) covering roughly half the docs per topic.
    """
    rng = random.Random(seed)
    topic_ids = list(range(1, n_topics + 1))
    records = []
    grades = {}
    for i in range(n_docs):
        doc_id = f"doc{i:03d}"
        words = list(VOCAB)
        topic = rng.choice(topic_ids + [0, 0])  # 0: background document
        grade = 0
        if topic:
            grade = rng.choice([1, 2])
            words = words + [f"signal{topic}", f"marker{topic}"] * 4
        records.append({
            "id": doc_id,
            "title": _sentence(rng, words, rng.randint(3, 6))[:-1],
            "abstract": _passage(rng, words, rng.randint(1, 3)),
            "fulltext": _passage(rng, words, rng.randint(0, 4)),
            "date": f"2020-0{rng.randint(1, 6)}-1{rng.randint(0, 5)}",
        })
        # ~70% of docs are judged, mixing 0/1/2 and leaving unjudged ones
        if topic and rng.random() < 0.9:
            grades[(topic, doc_id)] = grade
        elif rng.random() < 0.4:
            grades[(rng.choice(topic_ids), doc_id)] = 0
    topics = [
        (
            t,
            f"signal{t} research",
            f"What does marker{t} indicate? Is signal{t} involved?",
            f"Studies about signal{t} and marker{t} outcomes.",
        )
        for t in topic_ids
    ]
    qrels = sorted((t, d, g) for (t, d), g in grades.items())
    return records, topics, qrels


def abstract_signal_corpus(n_docs: int = 40, n_topics: int = 5, seed: int = 1):
    """Corpus where ONLY abstracts carry the relevance signal; titles and
    fulltext are interchangeable noise."""
    rng = random.Random(seed)
    topic_ids = list(range(1, n_topics + 1))
    records, qrels = [], []
    for i in range(n_docs):
        doc_id = f"doc{i:03d}"
        topic = topic_ids[i % (n_topics + 1)] if i % (n_topics + 1) < n_topics else 0
        abstract_words = list(VOCAB)
        if topic:
            abstract_words += [f"signal{topic}", f"marker{topic}"] * 6
        records.append({
            "id": doc_id,
            "title": _sentence(rng, VOCAB, 4)[:-1],
            "abstract": _passage(rng, abstract_words, 2),
            "fulltext": _passage(rng, VOCAB, 2),
            "date": "2020-03-01",
        })
        for t in topic_ids:
            qrels.append((t, doc_id, 2 if t == topic else 0))
    topics = [
        (t, f"signal{t} marker{t}", f"Evidence about signal{t}?", f"Reports on marker{t}.")
        for t in topic_ids
    ]
    return records, topics, qrels


def write_jsonl(records, path):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def write_topics_xml(topics, path):
    parts = ["<topics>"]
    for number, query, question, narrative in topics:
        parts.append(
            f'<topic number="{number}">'
            f"<query>{query}</query>"
            f"<question>{question}</question>"
            f"<narrative>{narrative}</narrative>"
            "</topic>"
        )
    parts.append("</topics>")
    path.write_text("\n".join(parts), encoding="utf-8")


def write_qrels(qrels, path):
    path.write_text(
        "".join(f"{t} 0 {d} {g}\n" for t, d, g in qrels), encoding="utf-8"
    )
