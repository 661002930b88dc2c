import random

import pytest

from molbench.smiles import parse_sanitized


def read_corpus(path):
    out = []
    for line in open(path):
        for i, ch in enumerate(line):
            if ch == "#" and (i == 0 or line[i - 1] in " \t"):
                line = line[:i]
                break
        line = line.strip()
        if line:
            out.append(line)
    return out


@pytest.fixture(scope="session")
def corpus_smiles():
    from importlib import resources
    base = resources.files("molbench.data")
    return (read_corpus(base / "corpus_synthetic.smi")
            + read_corpus(base / "corpus_natural.smi"))


@pytest.fixture(scope="session")
def corpus_mols(corpus_smiles):
    return [parse_sanitized(s) for s in corpus_smiles]


@pytest.fixture
def mini_dataset(tmp_path):
    """8 molecules + 1 malformed line, with a 6/2 train/test split."""
    smiles = ["CCO", "CCC", "c1ccccc1", "CC(=O)O", "CCN", "CCOC",
              "CC(C)O", "C1CCCCC1"]
    path = tmp_path / "mini.smi"
    path.write_text("\n".join(smiles + ["badsmiles("]) + "\n")
    train = tmp_path / "train.idx"
    train.write_text("\n".join(map(str, range(6))) + "\n")
    test = tmp_path / "test.idx"
    test.write_text("6\n7\n")
    return str(path), str(train), str(test)


def shuffle_smiles(smiles: str, seed: int) -> str:
    """Rewrite a molecule with a random atom order."""
    from molbench.smiles import parse_sanitized as ps, write
    mol = ps(smiles)
    order = list(range(len(mol.atoms)))
    random.Random(seed).shuffle(order)
    return write(mol, order=order)
