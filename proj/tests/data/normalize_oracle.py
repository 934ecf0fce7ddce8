#!/usr/bin/env python3
"""Independent oracle for the text-cleaning goldens.

Regenerate with:  python3 tests/data/normalize_oracle.py > tests/data/normalize_goldens.json
"""
import json
import re

SPLIT_CASES = [
    "Read more. Contact us",
    "e-mail settings",
    "a; b- c?d",
    "Home | About | Contact",
    "Buy now! Free shipping",
    "What is this? Find out",
    "left - right",
    "one; two; three",
    "no separators here",
    "",
    ". ",
    "trailing dot.",
    "trailing dot. ",
    "a. . b",
    "x.y.z",
    "3.5 stars",
    "well-known- fact",
    "Q?A? Yes? No",
    "wow!! great",
    "pipe|nospace | space",
    "semi;colon; split",
    "a.  b",
    "  lead. trail  ",
    "multi. sep! in? one| line- here; end",
    "dash -- double",
    "-- start",
    "end --",
    "ok!no! space",
    "www.example.com. Visit",
    "café. crème brûlée",
    "日本. 東京",
    "tab.\tnot space",
    "a.b. c.d",
    "?! mixed",
]

BRACE_CASES = [
    "Python (programming language)",
    "plain text",
    "a (b [c] d) e [f",
    "(whole)",
    "{curly} text",
    "text [square]",
    "nested ((deep) still) out",
    "nested {{a} b} c",
    "nested [[x] y] z",
    "unmatched ( open",
    "unmatched { open",
    "unmatched [ open",
    "stray ) close",
    "stray } close",
    "stray ] close",
    "(a]",
    "[a)",
    "{a)b}",
    "([)]",
    "a(b)c(d)e",
    "a{b}c[d]e(f)g",
    "()",
    "{}",
    "[]",
    ")(",
    "no (close [but] here",
    "x ] y [ z ] w",
    "George   Floyd (1973)",
    "café (été) ok",
    "multi (one) and (two) and (three)",
    ") leading closer",
    "double ((unbalanced) tail",
    "{[()]} gone",
]

URL_CASES = [
    "www.google.com",
    "company network",
    "see https: link",
    "http://foo",
    "https://bar",
    "visit www.site",
    "example.com",
    "mysite.net",
    "wikipedia.org",
    "stanford.edu",
    "dot com",
    "dotnet",
    "organic food",
    "education",
    "http",
    "https",
    "www",
    "wwwx",
    "www .com",
    ".com",
    ".net",
    ".org",
    ".edu",
    "http:",
    "https:",
    "www.",
    "a.comb",
    "x.network",
    "foo.organ",
    "my.educator",
    "com net org edu",
    "http colon",
    "httpsx:",
    "",
    "café.com",
]

URL_MARKERS = ["http:", "https:", "www.", ".com", ".net", ".org", ".edu"]


def split_oracle(s):
    return [p for p in re.split(r"[.?!|\-;] ", s) if p]


def brace_oracle(s):
    pairs = {"(": ")", "{": "}", "[": "]"}
    closers = set(pairs.values())
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c in pairs:
            close = pairs[c]
            depth = 0
            j = i
            end = len(s)
            while j < len(s):
                if s[j] == c:
                    depth += 1
                elif s[j] == close:
                    depth -= 1
                    if depth == 0:
                        end = j + 1
                        break
                j += 1
            i = end
            continue
        if c not in closers:
            out.append(c)
        i += 1
    return "".join(out)


def url_oracle(s):
    return any(m in s for m in URL_MARKERS)


def main():
    doc = {
        "split_anchor": [{"input": s, "expected": split_oracle(s)} for s in SPLIT_CASES],
        "remove_braced": [{"input": s, "expected": brace_oracle(s)} for s in BRACE_CASES],
        "contains_url_substring": [{"input": s, "expected": url_oracle(s)} for s in URL_CASES],
    }
    print(json.dumps(doc, indent=1, ensure_ascii=False))


if __name__ == "__main__":
    main()
