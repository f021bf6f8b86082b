"""Regenerates the reference data used by the unit tests.

tests/data/porter_vectors.tsv   word -> stem, from nltk's Porter stemmer
                                (original-algorithm mode with Martin's
                                published extensions)
tests/data/synthetic_counts.json collection statistics of the synthetic
                                corpus, recounted here without the C++ code
"""
import json
import re
import sys
from collections import Counter
from pathlib import Path

from nltk.stem.porter import PorterStemmer

ROOT = Path(__file__).resolve().parent.parent

STOPWORDS = set("""
a about above after again against all am an and any are as at be because been
before being below between both but by can d did do does doing don down during
each few for from further had has have having he her here hers herself him
himself his how i if in into is it its itself just ll m me more most my myself
no nor not now o of off on once only or other our ours ourselves out over own
re s same she should so some such t than that the their theirs them themselves
then there these they this those through to too under until up ve very was we
were what when where which while who whom why will with y you your yours
yourself yourselves
""".split())


def tokens(text):
    return [t for t in re.split(r"[^a-z0-9]+", text.lower()) if t]


def porter_vectors(stemmer):
    words = set()
    for name in ("spec.md", "paper.md"):
        p = ROOT / name
        if p.exists():
            words.update(t for t in tokens(p.read_text(errors="ignore")) if t.isalpha())
    for line in (ROOT / "data/synthetic/corpus.tsv").read_text().splitlines():
        words.update(t for t in tokens(line.split("\t", 1)[1]) if t.isalpha())
    extra = """caresses ponies ties caress cats feed agreed plastered bled motoring sing
    conflated troubled sized hopping tanned falling hissing fizzed failing filing
    happy sky relational conditional rational valenci hesitanci digitizer conformabli
    radicalli differentli vileli analogousli vietnamization predication operator
    feudalism decisiveness hopefulness callousness formaliti sensitiviti sensibiliti
    triplicate formative formalize electriciti electrical hopeful goodness revival
    allowance inference airliner gyroscopic adjustable defensible irritant replacement
    adjustment dependent adoption homologou communism activate angulariti homologous
    effective bowdlerize probate rate cease controll roll generalization oscillators
    a is as at by be generously archaeology logi bli abli""".split()
    words.update(extra)
    rows = sorted((w, stemmer.stem(w, to_lowercase=False)) for w in words)
    out = ROOT / "tests/data/porter_vectors.tsv"
    with out.open("w") as f:
        for w, s in rows:
            f.write(f"{w}\t{s}\n")
    return len(rows)


def synthetic_counts(stemmer):
    docs = 0
    total = 0
    cf = Counter()
    df = Counter()
    for line in (ROOT / "data/synthetic/corpus.tsv").read_text().splitlines():
        if not line.strip():
            continue
        docs += 1
        terms = [stemmer.stem(t, to_lowercase=False) for t in tokens(line.split("\t", 1)[1]) if t not in STOPWORDS]
        total += len(terms)
        cf.update(terms)
        df.update(set(terms))
    probe = sorted(cf, key=lambda t: (-cf[t], t))[:5] + sorted(cf, key=lambda t: (cf[t], t))[:5]
    data = {
        "num_docs": docs,
        "total_tokens": total,
        "vocabulary_size": len(cf),
        "terms": {t: {"df": df[t], "cf": cf[t]} for t in probe},
    }
    (ROOT / "tests/data/synthetic_counts.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return data


def main():
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    n = porter_vectors(stemmer)
    counts = synthetic_counts(stemmer)
    print(f"{n} porter vectors; corpus: {counts['num_docs']} docs, {counts['total_tokens']} tokens, "
          f"{counts['vocabulary_size']} terms", file=sys.stderr)


if __name__ == "__main__":
    main()
