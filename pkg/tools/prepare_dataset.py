#!/usr/bin/env python3
"""Turn a raw SMILES download (QM9, ZINC, or any corpus) into the dataset
layout the harness and acceptance suite expect:

  python3 tools/prepare_dataset.py raw_qm9.smi tests/fixtures/qm9 --name qm9 \
      --test-fraction 0.1 --seed 7
  python3 tools/prepare_dataset.py raw_zinc.smi tests/fixtures/zinc --name zinc \
      --sample 25000 --seed 7

Writes <out>.smi plus <out>.train.idx / <out>.test.idx (one index per
line, a seeded shuffle split).  Lines that fail this package's own parser
are dropped and counted, so downstream loads are clean.

QM9 is distributed as SDF at https://doi.org/10.6084/m9.figshare.978904
(extract SMILES with any SDF reader); ZINC SMILES files can be downloaded
from https://zinc.docking.org/tranches/home/.
"""

import argparse
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from molbench.errors import InvalidMolecule  # noqa: E402
from molbench.smiles import parse_sanitized  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("out_prefix")
    ap.add_argument("--name", default="custom")
    ap.add_argument("--sample", type=int, default=None,
                    help="seeded random subsample size")
    ap.add_argument("--test-fraction", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    with open(args.source) as fh:
        raw = [line.split()[0] for line in fh
               if line.strip() and not line.startswith("#")]

    rng = random.Random(args.seed)
    if args.sample and args.sample < len(raw):
        raw = rng.sample(raw, args.sample)

    kept, dropped = [], 0
    for smi in raw:
        try:
            parse_sanitized(smi)
            kept.append(smi)
        except InvalidMolecule:
            dropped += 1

    order = list(range(len(kept)))
    rng.shuffle(order)
    n_test = int(len(kept) * args.test_fraction)
    test, train = sorted(order[:n_test]), sorted(order[n_test:])

    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".smi").write_text("\n".join(kept) + "\n")
    prefix.with_suffix(".train.idx").write_text(
        "\n".join(map(str, train)) + "\n")
    prefix.with_suffix(".test.idx").write_text(
        "\n".join(map(str, test)) + "\n")
    print(f"{prefix}.smi: {len(kept)} molecules "
          f"({dropped} dropped), {len(train)} train / {len(test)} test")


if __name__ == "__main__":
    main()
