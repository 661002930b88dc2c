import pytest

from molbench.errors import KekulizationError
from molbench.molgraph import (BOND_DOUBLE, BOND_SINGLE, sanitize,
                               validate_valences)
from molbench.smiles import parse, parse_sanitized


def test_implicit_h_methane():
    mol = parse_sanitized("C")
    assert mol.implicit_hydrogens(0) == 4


def test_implicit_h_bracket_override():
    mol = parse_sanitized("[NH4+]")
    assert mol.implicit_hydrogens(0) == 4


def test_implicit_h_aromatic_carbon():
    mol = parse_sanitized("c1ccccc1")
    assert all(mol.implicit_hydrogens(i) == 1 for i in range(6))


def test_validate_valences_ok():
    mol = parse("O=C=O")
    sanitize(mol)
    assert validate_valences(mol) == []


def test_validate_valences_pentavalent_carbon():
    mol = parse("C(C)(C)(C)(C)C")
    violations = validate_valences(mol)
    assert violations and violations[0][0] == 0


def test_validate_valences_ch5():
    mol = parse("[CH5]")
    assert validate_valences(mol)


def test_rings_benzene():
    mol = parse_sanitized("c1ccccc1")
    assert len(mol.rings) == 1
    assert len(mol.rings[0]) == 6


def test_rings_naphthalene():
    mol = parse_sanitized("c1ccc2ccccc2c1")
    assert sorted(len(r) for r in mol.rings) == [6, 6]


def test_rings_cubane_cycle_space_rank():
    mol = parse_sanitized("C12C3C4C1C5C2C3C45")
    assert len(mol.rings) == 5  # E - V + C = 12 - 8 + 1


def test_rings_disconnected():
    mol = parse_sanitized("C1CC1.C1CCC1")
    assert sorted(len(r) for r in mol.rings) == [3, 4]


def test_aromatic_pyridine():
    mol = parse_sanitized("c1ccncc1")
    assert all(a.aromatic for a in mol.atoms)
    assert all(b.aromatic for b in mol.bonds)


def test_cyclobutadiene_rejected():
    with pytest.raises(KekulizationError):
        sanitize(parse("c1ccc1"))


def test_cyclohexane_not_aromatic():
    mol = parse_sanitized("C1CCCCC1")
    assert not any(a.aromatic for a in mol.atoms)


def test_kekulize_benzene():
    mol = parse_sanitized("c1ccccc1")
    orders = sorted(b.order for b in mol.bonds)
    assert orders == [BOND_SINGLE] * 3 + [BOND_DOUBLE] * 3


def test_kekulize_furan():
    mol = parse_sanitized("c1ccoc1")
    assert sum(1 for b in mol.bonds if b.order == BOND_DOUBLE) == 2


def test_kekule_input_perceived_aromatic():
    mol = parse_sanitized("C1=CC=CC=C1")
    assert all(a.aromatic for a in mol.atoms)


def test_handshake_lemma(corpus_mols):
    for mol in corpus_mols:
        n_h = sum(mol.implicit_hydrogens(i) for i in range(len(mol.atoms)))
        heavy = sum(mol.bond_order_sum(i) + mol.implicit_hydrogens(i)
                    for i in range(len(mol.atoms)))
        # hydrogen atoms contribute degree 1 each in the completed graph
        assert (heavy + n_h) % 2 == 0


def test_ring_count_matches_cycle_rank(corpus_mols):
    for mol in corpus_mols:
        n_components = len(mol.components())
        expected = len(mol.bonds) - len(mol.atoms) + n_components
        assert len(mol.rings) == expected


def test_frozen_after_sanitize():
    mol = parse_sanitized("CCO")
    with pytest.raises(Exception):
        mol.add_atom("C")
