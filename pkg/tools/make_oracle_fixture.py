#!/usr/bin/env python3
"""Build the descriptor-oracle fixture used by the acceptance suite.

Requires RDKit (not bundled; `pip install rdkit` where available) and a
SMILES file of reference molecules, e.g. a ZINC download:

  python3 tools/make_oracle_fixture.py zinc.smi tests/fixtures/oracle_descriptors.tsv \
      --n 1000 --seed 7

Output columns (tab-separated): smiles, logp, tpsa, qed, sa_raw.
SA raw scores come from RDKit's contributed sascorer when importable;
otherwise that column is written as NA and the corresponding acceptance
check skips.
"""

import argparse
import random
import sys


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("source", help="SMILES file, one molecule per line")
    ap.add_argument("output")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    try:
        from rdkit import Chem
        from rdkit.Chem import Crippen, Descriptors, QED
    except ImportError:
        sys.exit("RDKit is required to build the oracle fixture; install it "
                 "and re-run, or obtain the fixture from a machine that has it.")
    try:
        from rdkit.Chem import RDConfig
        sys.path.append(RDConfig.RDContribDir + "/SA_Score")
        import sascorer
    except ImportError:
        sascorer = None

    with open(args.source) as fh:
        pool = [line.strip() for line in fh
                if line.strip() and not line.startswith("#")]
    rng = random.Random(args.seed)
    chosen = rng.sample(pool, min(args.n, len(pool)))

    rows = []
    for smi in chosen:
        mol = Chem.MolFromSmiles(smi)
        if mol is None:
            continue
        sa = f"{sascorer.calculateScore(mol):.6f}" if sascorer else "NA"
        rows.append("\t".join([
            smi,
            f"{Crippen.MolLogP(mol):.6f}",
            f"{Descriptors.TPSA(mol):.6f}",
            f"{QED.qed(mol):.6f}",
            sa,
        ]))

    with open(args.output, "w") as fh:
        fh.write("# smiles\tlogp\ttpsa\tqed\tsa_raw\n")
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {args.output} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
