import random

import pytest

from conftest import shuffle_smiles
from molbench.errors import InvalidMolecule, ParseError
from molbench.molgraph import BOND_DOUBLE
from molbench.smarts import isomorphic
from molbench.smiles import (canonicalize, canonicalize_mol, parse,
                             parse_sanitized, write)


def test_parse_acetic_acid():
    mol = parse("CC(=O)O")
    assert len(mol.atoms) == 4
    assert len(mol.bonds) == 3
    assert sum(1 for b in mol.bonds if b.order == BOND_DOUBLE) == 1


def test_parse_cyclopropane():
    mol = parse("C1CC1")
    assert len(mol.atoms) == 3
    assert len(mol.bonds) == 3


def test_parse_unclosed_branch():
    with pytest.raises(ParseError) as exc:
        parse("C(")
    assert exc.value.offset == 1
    assert "branch" in str(exc.value)


def test_parse_dangling_ring_bond():
    with pytest.raises(ParseError):
        parse("C1CC")


def test_parse_unknown_element():
    with pytest.raises(ParseError):
        parse("[Xx]")


def test_parse_empty_bracket():
    with pytest.raises(ParseError):
        parse("[]")


def test_parse_percent_ring_numbers():
    mol = parse_sanitized("C%10CC%10")
    assert len(mol.rings) == 1


def test_parse_never_panics_on_garbage():
    rng = random.Random(9)
    alphabet = "CNcn()[]=#123%+-@/\\.Ox$ {"
    for _ in range(500):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(12)))
        try:
            parse(text)
        except ParseError:
            pass


def test_write_single_atom():
    assert write(parse_sanitized("O")) == "O"


def test_write_isotope_preserved():
    out = write(parse_sanitized("[13CH4]"))
    assert "13" in out
    assert parse_sanitized(out).atoms[0].isotope == 13


def test_roundtrip_benzene_isomorphic():
    mol = parse_sanitized("c1ccccc1")
    again = parse_sanitized(write(mol))
    assert isomorphic(mol, again)


def test_roundtrip_corpus(corpus_smiles):
    for s in corpus_smiles:
        mol = parse_sanitized(s)
        again = parse_sanitized(write(mol))
        assert isomorphic(mol, again), s


def test_canonical_equality_cco():
    assert canonicalize("OCC") == canonicalize("CCO")


def test_canonical_idempotent(corpus_smiles):
    for s in corpus_smiles[:40]:
        c = canonicalize(s)
        assert canonicalize(c.text) == c


def test_canonical_kekule_equals_aromatic():
    assert canonicalize("C1=CC=CC=C1") == canonicalize("c1ccccc1")


def test_canonical_distinguishes_constitution():
    assert canonicalize("CCO") != canonicalize("COC")
    assert canonicalize("C/C=C/C") == canonicalize("CC=CC")  # stereo-free key


def test_canonical_permutation_invariance(corpus_smiles):
    rng = random.Random(13)
    for s in rng.sample(corpus_smiles, 25):
        reference = canonicalize(s)
        for seed in range(10):
            assert canonicalize(shuffle_smiles(s, seed)) == reference, s


def test_invalid_wrapped():
    with pytest.raises(InvalidMolecule):
        canonicalize("C(")
    with pytest.raises(InvalidMolecule):
        canonicalize("C(C)(C)(C)(C)C")
    with pytest.raises(InvalidMolecule):
        canonicalize("c1ccc1")


def test_charged_and_multifragment_accepted():
    canonicalize("[NH4+].[Cl-]")
    canonicalize("C(=O)[O-]")
