"""Rebuild crates/core/resources/vocabulary.txt.

General English words come from the wordfreq top-N list; clinical words come
from scripts/medical_words.txt plus every word that appears in the shipped
resource files (lexicons, gazetteers, templates).
"""
import json
import pathlib
import re

from wordfreq import top_n_list

ROOT = pathlib.Path(__file__).resolve().parent.parent
RES = ROOT / "crates" / "core" / "resources"
GENERAL_N = 9000

words = set()
for w in top_n_list("en", GENERAL_N):
    if w.isascii() and w.isalpha() and len(w) >= 2:
        words.add(w)
words.update((ROOT / "scripts" / "medical_words.txt").read_text().split())

def add_text(text):
    for tok in re.findall(r"[A-Za-z]+", text):
        if not tok.isupper() or len(tok) == 1:
            words.add(tok.lower())

abbrevs = json.loads((RES / "abbreviations.json").read_text())
for e in abbrevs["entries"]:
    for x in e["expansions"]:
        add_text(x["expansion"])
        for c in x["context_cues"]:
            add_text(c)
for p in json.loads((RES / "terms.json").read_text())["pairs"]:
    add_text(p["standard"])
for name in ("medications.json", "findings.json"):
    for e in json.loads((RES / name).read_text())["entries"]:
        add_text(e["name"])
        for s in e["synonyms"]:
            add_text(s)
for m in json.loads((RES / "headings.json").read_text())["mapping"]:
    add_text(m["pattern"])
templates = json.loads((RES / "templates.json").read_text())
for sentences in templates["leaves"].values():
    for s in sentences:
        add_text(re.sub(r"\[[a-z]:[^\]]*\]", " ", s))

words = sorted(w for w in words if w.isalpha())
(RES / "vocabulary.txt").write_text("\n".join(words) + "\n")
print(len(words))
