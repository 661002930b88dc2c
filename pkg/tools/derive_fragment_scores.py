#!/usr/bin/env python3
"""Derive the fragment frequency tables used by the synthetic-accessibility
and natural-product scores from the two bundled reference corpora.

The derivation is deterministic and re-runnable:

  python3 tools/derive_fragment_scores.py

Synthetic-accessibility fragment scores: count radius-0..2 circular
environments over corpus_synthetic.smi.  Fragments are ranked by count and
the reference count is the one at which the cumulative share of all
occurrences reaches 80 percent; each fragment scores
log10(count / reference_count), clamped to [-4, 4].  Common fragments score
near or above zero, rare ones negative; fragments absent from the table
default to -4 at scoring time.

Natural-product fragment scores: for each environment seen in either
corpus, score = log10((nat_count + 1) / nat_total) minus the same term for
the synthetic corpus, clamped to [-3, 3].  Positive means the fragment is
characteristic of the natural-product corpus.
"""

import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from molbench.fingerprints import morgan_environments  # noqa: E402
from molbench.smiles import parse_sanitized  # noqa: E402

DATA = ROOT / "src" / "molbench" / "data"


def read_corpus(path: Path) -> list[str]:
    out = []
    for line in path.read_text().splitlines():
        for i, ch in enumerate(line):
            if ch == "#" and (i == 0 or line[i - 1] in " \t"):
                line = line[:i]
                break
        line = line.strip()
        if line:
            out.append(line)
    return out


def env_counts(smiles_list: list[str]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for s in smiles_list:
        mol = parse_sanitized(s)
        for h, c in morgan_environments(mol, radius=2).items():
            counts[h] = counts.get(h, 0) + c
    return counts


def derive_sa(counts: dict[int, int]) -> dict[int, float]:
    total = sum(counts.values())
    ranked = sorted(counts.values(), reverse=True)
    running = 0
    ref = ranked[-1]
    for c in ranked:
        running += c
        if running >= 0.8 * total:
            ref = c
            break
    return {h: max(-4.0, min(4.0, math.log10(c / ref)))
            for h, c in counts.items()}


def derive_np(nat: dict[int, int], syn: dict[int, int]) -> dict[int, float]:
    nat_total = sum(nat.values())
    syn_total = sum(syn.values())
    scores = {}
    for h in set(nat) | set(syn):
        ln = math.log10((nat.get(h, 0) + 1) / nat_total)
        ls = math.log10((syn.get(h, 0) + 1) / syn_total)
        scores[h] = max(-3.0, min(3.0, ln - ls))
    return scores


def write_table(path: Path, scores: dict[int, float], header: str) -> None:
    lines = [header]
    for h in sorted(scores):
        lines.append(f"{h}\t{scores[h]:.4f}")
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(scores)} fragments)")


def main() -> None:
    syn = env_counts(read_corpus(DATA / "corpus_synthetic.smi"))
    nat = env_counts(read_corpus(DATA / "corpus_natural.smi"))
    write_table(
        DATA / "sa_fragments.tsv", derive_sa(syn),
        "# Synthetic-accessibility fragment scores.  Generated by\n"
        "# tools/derive_fragment_scores.py from corpus_synthetic.smi; do not\n"
        "# edit by hand.  Rows: environment-hash <TAB> score.")
    write_table(
        DATA / "np_fragments.tsv", derive_np(nat, syn),
        "# Natural-product likeness fragment scores.  Generated by\n"
        "# tools/derive_fragment_scores.py from the two bundled corpora; do\n"
        "# not edit by hand.  Rows: environment-hash <TAB> score.")


if __name__ == "__main__":
    main()
