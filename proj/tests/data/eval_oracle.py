#!/usr/bin/env python3
"""Brute-force evaluation oracle for eval_index.tsv / eval_queries.txt (k = 10).

    python3 tests/data/eval_oracle.py csv  > tests/data/eval_report.golden.csv
    python3 tests/data/eval_oracle.py text > tests/data/eval_report.golden.txt
"""
import os
import sys

K = 10
here = os.path.dirname(os.path.abspath(__file__))
entries = []
with open(os.path.join(here, "eval_index.tsv"), encoding="utf-8") as f:
    for line in f:
        text, count = line.rstrip("\n").split("\t")
        entries.append((text, int(count)))
with open(os.path.join(here, "eval_queries.txt"), encoding="utf-8") as f:
    queries = [q.rstrip("\n") for q in f if q.strip()]


def lookup(prefix):
    hits = [e for e in entries if e[0].startswith(prefix)]
    hits.sort(key=lambda e: (-e[1], e[0]))
    return hits[:K]


def prefixes(q):
    words = q.split(" ")
    chars = [q[:n] for n in range(1, 6)]
    word_prefixes = [" ".join(words[:n]) for n in range(1, 6)]
    return [("char", n + 1, p) for n, p in enumerate(chars)] + \
           [("word", n + 1, p) for n, p in enumerate(word_prefixes)]


rows = []
for cond in range(10):
    rr_sum = 0.0
    returned_sum = 0.0
    for q in queries:
        mode, length, p = prefixes(q)[cond]
        res = lookup(p)
        returned_sum += len(res)
        for pos, (text, _) in enumerate(res):
            if text == q:
                rr_sum += 1.0 / (pos + 1)
                break
    rows.append((mode, length, rr_sum / len(queries), returned_sum / len(queries)))

if sys.argv[1:] == ["text"]:
    print("Prefix  MRR    Returned")
    for mode, length, mrr, ret in rows:
        print("%d %s  %.3f  %.2f" % (length, mode, mrr, ret))
else:
    print("mode,length,mrr,mean_returned,n")
    for mode, length, mrr, ret in rows:
        print("%s,%d,%.17g,%.17g,%d" % (mode, length, mrr, ret, len(queries)))
