#!/usr/bin/env python3
"""Regenerates the bundled toy corpus and inventories.

The corpus is templated: each topic has a pool of context words and one
designed synonym pair whose two members are sampled into the same contexts,
so distributional trainers should pull the pair together. All inventory
files are drawn from the same vocabulary. Deterministic; run from data/.
"""

import random

rng = random.Random(20250811)

CONSONANTS = "bdgjklmnprstvz"
VOWELS = "aeiou"

N_TOPICS = 30
CTX_PER_TOPIC = 8
SENTENCES_PER_TOPIC = 100
N_FILLERS = 30

used = set()


def make_word(min_syll=1, max_syll=2):
    while True:
        n = rng.randint(min_syll, max_syll)
        w = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(n))
        if rng.random() < 0.4:
            w += rng.choice(CONSONANTS)
        if 3 <= len(w) <= 5 and w not in used:
            used.add(w)
            return w


topics = []
for t in range(N_TOPICS):
    topics.append({
        "ctx": [make_word() for _ in range(CTX_PER_TOPIC)],
        "syn": (make_word(), make_word()),
    })
fillers = [make_word() for _ in range(N_FILLERS)]

# ---- corpus ----
sentences = []
for t, topic in enumerate(topics):
    for i in range(SENTENCES_PER_TOPIC):
        words = rng.sample(topic["ctx"], rng.randint(4, 6))
        words.append(topic["syn"][i % 2])
        if rng.random() < 0.5:
            words.append(rng.choice(fillers))
        rng.shuffle(words)
        sentences.append(" ".join(words))
rng.shuffle(sentences)
with open("toy_corpus.txt", "w") as f:
    f.write("\n".join(sentences) + "\n")

with open("toy_synonym_pairs.tsv", "w") as f:
    for topic in topics:
        f.write(f"{topic['syn'][0]}\t{topic['syn'][1]}\n")

# ---- lexicon: varga per topic, synonym pair + context words as synsets ----
with open("toy_lexicon.tsv", "w") as f:
    for t, topic in enumerate(topics):
        varga = f"varga{t}"
        for w in topic["syn"]:
            f.write(f"{varga}\t{varga}_s0\t{w}\n")
        for i, w in enumerate(topic["ctx"]):
            f.write(f"{varga}\t{varga}_s{1 + i // 4}\t{w}\n")

# ---- relatedness inventory: 60 pairs per class, half dev half test ----
pairs = []
for t, topic in enumerate(topics[:30]):
    a, b = topic["syn"]
    pairs.append((a, b, "SYNSET"))
    c1, c2, c3, c4 = rng.sample(topic["ctx"], 4)
    pairs.append((c1, c2, "VARGA"))
    other = topics[(t + 7) % N_TOPICS]
    pairs.append((c3, rng.choice(other["ctx"]), "UNRELATED"))
pairs = pairs * 2
rng.shuffle(pairs)
seen = set()
rows = []
for a, b, label in pairs:
    key = (min(a, b), max(a, b))
    if key in seen or a == b:
        continue
    seen.add(key)
    rows.append((a, b, label))
with open("toy_relatedness.tsv", "w") as f:
    for i, (a, b, label) in enumerate(rows):
        split = "dev" if i % 2 == 0 else "test"
        f.write(f"{a}\t{b}\t{label}\t{split}\n")

# ---- synonym MCQs: target/answer from the pair, distractors from context ----
with open("toy_synonym.tsv", "w") as f:
    for topic in topics:
        target, answer = topic["syn"]
        distractors = rng.sample(topic["ctx"], 3)
        cands = [answer] + distractors
        rng.shuffle(cands)
        f.write(f"{target}\t" + "\t".join(cands) + f"\t{cands.index(answer)}\n")

# ---- paradigms and relations for the analogy builder ----
SUFFIXES = ["as", "am", "ena"]
with open("toy_paradigms.tsv", "w") as f:
    for fam in range(3):
        for lemma_i in range(4):
            lemma = topics[fam * 4 + lemma_i]["ctx"][0]
            for cell, suf in enumerate(SUFFIXES):
                f.write(f"family{fam}\t{lemma}\tcell{cell}\t{lemma}{suf}\n")
with open("toy_relations.tsv", "w") as f:
    for t in range(10):
        a, b = topics[t]["syn"]
        f.write(f"topicpair\t{a}\t{b}\n")

# ---- analogy inventory: semantic from synonym pairs, syntactic from suffixes ----
with open("toy_analogy.tsv", "w") as f:
    n_syn = 0
    for fam in range(3):
        lemmas = [topics[fam * 4 + i]["ctx"][0] for i in range(4)]
        for i in range(4):
            for j in range(i + 1, 4):
                for suf in SUFFIXES[:2]:
                    f.write(f"{lemmas[i]}\t{lemmas[i]}{suf}\t{lemmas[j]}\t{lemmas[j]}{suf}"
                            "\tsyntactic\n")
                    n_syn += 1
    for t in range(10):
        a, b = topics[t]["syn"]
        c, d = topics[t + 10]["syn"]
        f.write(f"{a}\t{b}\t{c}\t{d}\tsemantic\n")

# ---- categorization: topics as categories ----
with open("toy_categorization_sem.tsv", "w") as f:
    for t in range(5):
        for w in topics[t]["ctx"][:6]:
            f.write(f"group{t}\t{w}\n")
with open("toy_categorization_syn.tsv", "w") as f:
    for fam in range(4):
        for w in topics[5 + fam]["ctx"][:5]:
            f.write(f"form{fam}\t{w}\n")

print("wrote toy corpus:", len(sentences), "sentences")
