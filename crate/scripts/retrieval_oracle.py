"""Recounts retrieved snippets for every (omit_stop, mode) cell.

Independent of the Rust index: NLTK Porter stems, a linear scan over
question titles, and a line-based fence counter. Shares only the stop word
and lemma tables. Writes JSON with per-task counts, cell totals and the
keyword and posting counts of each index.
"""
import json
import re
import sys

from nltk.stem.porter import PorterStemmer

P = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
MODES = ["none", "stem", "lemma"]


def table(path):
    with open(path) as f:
        return [l.strip() for l in f if l.strip() and not l.strip().startswith("#")]


def stem_key(w):
    cur = P.stem(w, to_lowercase=True)
    for _ in range(16):
        nxt = P.stem(cur, to_lowercase=True)
        if nxt == cur:
            break
        cur = nxt
    return cur


STOP = {w.lower() for w in table("crates/core/data/stopwords.txt")}
MERGE = {}
for line in table("crates/core/data/lemmas.txt"):
    parts = line.split()
    if len(parts) >= 2:
        a, b = stem_key(parts[0]), stem_key(parts[1])
        if a != b:
            MERGE.setdefault(a, b)


def lemma_of(s):
    seen = {s}
    while s in MERGE and MERGE[s] not in seen:
        s = MERGE[s]
        seen.add(s)
    return s


def key(tok, mode):
    if mode == "none":
        return tok
    s = stem_key(tok)
    return lemma_of(s) if mode == "lemma" else s


def stop_keys(mode):
    if mode == "none":
        return STOP
    stems = {stem_key(w) for w in STOP} | STOP
    if mode == "stem":
        return stems
    return {lemma_of(s) for s in stems} | STOP


def tokens(text):
    out = []
    for t in re.split(r"[^\w']|_", text):
        t = t.strip("'").lower()
        if t:
            out.append(t)
    return out


def keyset(text, mode, omit):
    stops = stop_keys(mode)
    return {key(t, mode) for t in tokens(text) if not (omit and key(t, mode) in stops)}


def blocks(body):
    n, inside, has = 0, False, False
    for line in body.split("\n"):
        if line.lstrip().startswith("```"):
            if inside and has:
                n += 1
            inside, has = not inside, False
        elif inside and line.strip():
            has = True
    if inside and has:
        n += 1
    return n


def main(corpus, tasks, out):
    docs = [json.loads(l) for l in open(corpus) if l.strip()]
    tasks = [json.loads(l)["task"] for l in open(tasks) if l.strip()]
    questions = [d for d in docs if d["kind"] == "question"]
    per_q = {q["id"]: 0 for q in questions}
    for d in docs:
        if d["kind"] == "answer":
            per_q[d["parent_id"]] += blocks(d["body"])
    cells = []
    for omit in (False, True):
        for mode in MODES:
            counts = {}
            for t in tasks:
                want = keyset(t.rstrip("?").strip(), mode, omit)
                if not want:
                    counts[t] = 0
                    continue
                counts[t] = sum(
                    per_q[q["id"]] for q in questions if want <= keyset(q.get("title") or "", mode, omit)
                )
            sets = [keyset(q.get("title") or "", mode, omit) for q in questions]
            cells.append({
                "omit_stop": omit,
                "mode": mode,
                "total": sum(counts.values()),
                "per_task": counts,
                "keywords": len(set().union(*sets)),
                "postings": sum(len(k) for k in sets),
            })
    with open(out, "w") as f:
        json.dump({"cells": cells}, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    a = sys.argv[1:] + [None] * 3
    main(a[0] or "data/corpus.jsonl", a[1] or "data/tasks.jsonl", a[2] or "crates/core/tests/data/retrieval_matrix.json")
