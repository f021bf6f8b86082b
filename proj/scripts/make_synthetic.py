#!/usr/bin/env python3
"""Generate the bundled synthetic test collection.

Writes corpus.tsv (doc_id<TAB>text), topics.tsv (qid<TAB>query) and
qrels.txt (qid 0 doc_id grade) into the output directory. Output is a pure
function of --seed.

The collection is a topical mixture: every topic owns a small vocabulary,
documents draw tokens from one topic (with a varying topicality) plus a
Zipfian background, and relevance grades follow topicality. Topics overlap
to different degrees so query difficulty varies.
"""

import argparse
import os
import random

NUM_DOCS = 1000
NUM_TOPICS = 50
BACKGROUND_VOCAB = 1500
TOPIC_VOCAB = 12
FIRST_QID = 401

ONSETS = ["b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t",
          "v", "z", "br", "dr", "gr", "kl", "pl", "st", "tr", "sk"]
NUCLEI = ["a", "e", "i", "o", "u", "ai", "ou"]
CODAS = ["", "", "n", "r", "l", "m", "k", "x", "th", "nd"]
STOPWORDS = ["the", "of", "and", "a", "in", "to", "is", "for", "with", "on"]


def make_word(rng, syllables):
    parts = []
    for _ in range(syllables):
        parts.append(rng.choice(ONSETS) + rng.choice(NUCLEI) + rng.choice(CODAS))
    return "".join(parts)


def unique_words(rng, count, taken, syllable_choices):
    words = []
    while len(words) < count:
        w = make_word(rng, rng.choice(syllable_choices))
        if w in taken or len(w) < 4:
            continue
        taken.add(w)
        words.append(w)
    return words


def zipf_weights(n, s):
    return [1.0 / ((i + 1) ** s) for i in range(n)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20220410)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "synthetic"))
    args = ap.parse_args()
    rng = random.Random(args.seed)

    taken = set(STOPWORDS)
    background = unique_words(rng, BACKGROUND_VOCAB, taken, [2, 2, 3])
    bg_weights = zipf_weights(BACKGROUND_VOCAB, 1.05)

    topics = []
    for t in range(NUM_TOPICS):
        own = unique_words(rng, TOPIC_VOCAB, taken, [2, 3, 3])
        topics.append(own)
    # Cross-topic sharing: later topics borrow words from neighbours, which
    # makes their queries ambiguous.
    for t in range(NUM_TOPICS):
        overlap = rng.choice([0, 0, 1, 2, 3, 4])
        for j in range(overlap):
            other = topics[(t + 1 + j) % NUM_TOPICS]
            topics[t][TOPIC_VOCAB - 1 - j] = other[j]
    topic_weights = zipf_weights(TOPIC_VOCAB, 0.8)

    docs = []
    qrels = []
    topic_docs = {t: [] for t in range(NUM_TOPICS)}
    for d in range(NUM_DOCS):
        doc_id = "SYN-%04d" % (d + 1)
        if rng.random() < 0.75:
            topic = rng.randrange(NUM_TOPICS)
            topicality = rng.betavariate(1.3, 5.0) * 0.6
        else:
            topic = None
            topicality = 0.0
        length = rng.randint(30, 260)
        tokens = []
        for i in range(length):
            r = rng.random()
            if r < 0.18:
                tokens.append(rng.choice(STOPWORDS))
            elif topic is not None and r < 0.18 + topicality:
                tokens.append(rng.choices(topics[topic], topic_weights)[0])
            else:
                tokens.append(rng.choices(background, bg_weights)[0])
        text_parts = []
        for i, tok in enumerate(tokens):
            if i == 0 or rng.random() < 0.03:
                tok = tok.capitalize()
            text_parts.append(tok)
            if rng.random() < 0.05:
                text_parts[-1] += rng.choice([",", ".", ";", ":"])
        docs.append((doc_id, " ".join(text_parts)))
        if topic is not None:
            topic_docs[topic].append((doc_id, topicality))

    for t in range(NUM_TOPICS):
        qid = str(FIRST_QID + t)
        judged = sorted(topic_docs[t], key=lambda p: (-p[1], p[0]))
        threshold = rng.uniform(0.05, 0.2)
        relevant = 0
        for doc_id, topicality in judged:
            noisy = topicality + rng.gauss(0.0, 0.04)
            if noisy >= 2.0 * threshold:
                grade = 2
            elif noisy >= threshold:
                grade = 1
            else:
                grade = 0
            relevant += grade > 0
            qrels.append((qid, doc_id, grade))
        if relevant == 0 and judged:
            doc_id = judged[0][0]
            qrels = [(q, d, 1 if (q == qid and d == doc_id) else g) for q, d, g in qrels]
        # A few judged non-relevant background documents per topic.
        for _ in range(5):
            doc_id = "SYN-%04d" % (rng.randrange(NUM_DOCS) + 1)
            if all(not (q == qid and d == doc_id) for q, d, _ in qrels[-60:]):
                qrels.append((qid, doc_id, 0))

    queries = []
    for t in range(NUM_TOPICS):
        qlen = rng.choice([2, 2, 3, 3, 3, 4])
        picks = rng.sample(range(TOPIC_VOCAB), qlen)
        words = [topics[t][p] for p in picks]
        if rng.random() < 0.3:
            words[-1] = rng.choice(background[:200])
        if rng.random() < 0.4:
            words.insert(1, rng.choice(STOPWORDS))
        queries.append((str(FIRST_QID + t), " ".join(w.capitalize() if i == 0 else w for i, w in enumerate(words))))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "corpus.tsv"), "w", newline="\n") as f:
        for doc_id, text in docs:
            f.write("%s\t%s\n" % (doc_id, text))
    with open(os.path.join(args.out, "topics.tsv"), "w", newline="\n") as f:
        for qid, text in queries:
            f.write("%s\t%s\n" % (qid, text))
    with open(os.path.join(args.out, "qrels.txt"), "w", newline="\n") as f:
        for qid, doc_id, grade in sorted(qrels, key=lambda r: (int(r[0]), r[1])):
            f.write("%s 0 %s %d\n" % (qid, doc_id, grade))


if __name__ == "__main__":
    main()
