"""Freezes reference stems from NLTK's PorterStemmer in original mode.

Reads one word per line and writes word<TAB>single-pass stem<TAB>fixed-point stem.
"""
import sys

from nltk.stem.porter import PorterStemmer


def main(words_path, out_path):
    p = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    words = [w.strip() for w in open(words_path) if w.strip()]
    with open(out_path, "w") as f:
        for w in words:
            one = p.stem(w, to_lowercase=True)
            fix = one
            for _ in range(16):
                nxt = p.stem(fix, to_lowercase=True)
                if nxt == fix:
                    break
                fix = nxt
            else:
                sys.exit(f"no fixed point for {w}")
            f.write(f"{w}\t{one}\t{fix}\n")


if __name__ == "__main__":
    main(
        sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/porter_words.txt",
        sys.argv[2] if len(sys.argv) > 2 else "crates/core/tests/data/porter_oracle.tsv",
    )
