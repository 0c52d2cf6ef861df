# Writes cases.jsonl: the export expected for the scenario built by the
# acceptance binary (two documents, two cases, fixed clock).
import hashlib
import json
import pathlib

P_NAME = "notes.txt"
P_TEXT = "Heat flows from hot regions to cold ones.\n\nIt never reverses by itself."
Q_NAME = "energy.tex"
Q_TEXT = "Energy obeys ⟪F1⟫\nhere.\n\nA second line of prose."
Q_F1 = "<math><mi>E</mi><mo>=</mo><mi>m</mi><msup><mi>c</mi><mn>2</mn></msup></math>"
CREATED = "2024-06-11T00:00:00Z"


def fingerprint(text, formulas=(), images=()):
    return hashlib.sha256("\0".join([text, *formulas, *images]).encode()).hexdigest()


def span_of(text, piece):
    start = text.index(piece)
    return {"start": start, "end": start + len(piece)}


fp_p = fingerprint(P_TEXT)
fp_q = fingerprint(Q_TEXT, [Q_F1])

cases = [
    {
        "case_id": 1, "doc_a": P_NAME, "doc_b": Q_NAME,
        "doc_a_fingerprint": fp_p, "doc_b_fingerprint": fp_q,
        "span_a": span_of(P_TEXT, "Heat flows from hot regions to cold ones."),
        "span_b": span_of(Q_TEXT, "Energy obeys ⟪F1⟫\nhere."),
        "text_a": "Heat flows from hot regions to cold ones.",
        "text_b": "Energy obeys ⟪F1⟫\nhere.",
        "formulas_a": [], "formulas_b": [{"id": "F1", "mathml": Q_F1}],
        "images_a": [], "images_b": [],
        "content_types": ["text", "math"], "obfuscation": "paraphrase",
        "created_at": CREATED,
    },
    {
        "case_id": 2, "doc_a": Q_NAME, "doc_b": P_NAME,
        "doc_a_fingerprint": fp_q, "doc_b_fingerprint": fp_p,
        "span_a": span_of(Q_TEXT, "A second line of prose."),
        "span_b": span_of(P_TEXT, "It never reverses by itself."),
        "text_a": "A second line of prose.",
        "text_b": "It never reverses by itself.",
        "formulas_a": [], "formulas_b": [],
        "images_a": [], "images_b": [],
        "content_types": ["text"], "obfuscation": None,
        "created_at": CREATED,
    },
]

out = pathlib.Path(__file__).with_name("cases.jsonl")
with out.open("w", encoding="utf-8", newline="\n") as f:
    for c in cases:
        f.write(json.dumps(c, ensure_ascii=False, separators=(",", ":")) + "\n")
