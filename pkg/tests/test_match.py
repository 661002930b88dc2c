import itertools
import random

import pytest

from conftest import shuffle_smiles
from molbench.errors import SmartsError, WidthMismatch
from molbench.fingerprints import morgan_fingerprint, tanimoto
from molbench.smarts import (count_matches, find_matches, has_match,
                             isomorphic, parse_smarts)
from molbench.smiles import parse_sanitized


def test_parse_oh_pattern():
    p = parse_smarts("[OH]")
    assert len(p.atoms) == 1


def test_parse_benzene_pattern():
    p = parse_smarts("c1ccccc1")
    assert len(p.atoms) == 6
    assert len(p.bonds) == 6


def test_parse_recursive_depth_one():
    parse_smarts("[#6$(C=O)]")


def test_unsupported_primitive_rejected():
    with pytest.raises(SmartsError):
        parse_smarts("[C@H]")  # chirality queries unsupported
    with pytest.raises(SmartsError):
        parse_smarts("[$([$(C)])]C=O")  # recursion nested past depth 1


def test_oh_on_ethanol():
    mol = parse_sanitized("CCO")
    assert find_matches(parse_smarts("[OH]"), mol) == [(2,)]


def test_benzene_on_toluene_dedup():
    mol = parse_sanitized("Cc1ccccc1")
    assert len(find_matches(parse_smarts("c1ccccc1"), mol)) == 1


def test_empty_molecule_no_matches():
    from molbench.molgraph import Molecule
    assert find_matches(parse_smarts("C"), Molecule()) == []


def test_reflexivity_trivial_pattern(corpus_mols):
    p = parse_smarts("*")
    for mol in corpus_mols[:30]:
        assert has_match(p, mol)


def test_primitive_selection():
    mol = parse_sanitized("CC(=O)[O-]")
    assert count_matches(parse_smarts("[O-]"), mol) == 1
    assert count_matches(parse_smarts("[#8]"), mol) == 2
    assert count_matches(parse_smarts("[CX3]"), mol) == 1


def test_ring_primitives():
    mol = parse_sanitized("C1CC1CC")
    assert count_matches(parse_smarts("[R]"), mol) == 3
    assert count_matches(parse_smarts("[r3]"), mol) == 3
    assert count_matches(parse_smarts("[R0]"), mol) == 2


def test_bond_primitives():
    mol = parse_sanitized("C=CC#N")
    assert has_match(parse_smarts("C=C"), mol)
    assert has_match(parse_smarts("C#N"), mol)
    assert not has_match(parse_smarts("C=N"), mol)
    assert has_match(parse_smarts("C~N"), mol)


# -- brute-force oracle -----------------------------------------------------

def _random_tree_smiles(rng, n):
    children = {0: []}
    degree = {0: 0}
    for i in range(1, n):
        parent = rng.choice([j for j in range(i) if degree[j] < 4])
        children[parent].append(i)
        degree[parent] += 1
        children[i] = []
        degree[i] = 1

    def emit(i):
        parts = [c for c in children[i]]
        out = "C"
        for idx, c in enumerate(parts):
            sub = emit(c)
            out += sub if idx == len(parts) - 1 else f"({sub})"
        return out
    return emit(0)


def _brute_force_matches(pattern, mol, ctx_cls=None):
    from molbench.smarts import _context
    ctx = _context(mol)
    n_p, n_t = len(pattern.atoms), len(mol.atoms)
    p_adj = {}
    for k, pb in enumerate(pattern.bonds):
        p_adj[(pb.a, pb.b)] = pb.expr
        p_adj[(pb.b, pb.a)] = pb.expr
    hits = set()
    for perm in itertools.permutations(range(n_t), n_p):
        ok = all(pattern.atoms[i].expr.eval(ctx, perm[i]) for i in range(n_p))
        if not ok:
            continue
        for (pa, pb), expr in p_adj.items():
            if pa > pb:
                continue
            bond = mol.bond_between(perm[pa], perm[pb])
            if bond is None:
                ok = False
                break
            b_idx = mol.bonds.index(bond)
            if not expr.eval(ctx, b_idx):
                ok = False
                break
        if ok:
            # pattern edges must cover adjacency both ways for embeddings,
            # but subgraph (monomorphism) semantics only require pattern
            # edges to exist in the target
            hits.add(frozenset(perm))
    return hits


def test_vf2_agrees_with_brute_force():
    rng = random.Random(5)
    for _ in range(120):
        target = parse_sanitized(_random_tree_smiles(rng, rng.randrange(3, 9)))
        pattern = parse_smarts(_random_tree_smiles(rng, rng.randrange(1, 5)))
        got = {frozenset(m) for m in find_matches(pattern, target)}
        want = _brute_force_matches(pattern, target)
        assert got == want


# -- fingerprints -----------------------------------------------------------

def test_fp_deterministic():
    a = morgan_fingerprint(parse_sanitized("C"))
    b = morgan_fingerprint(parse_sanitized("C"))
    assert a == b


def test_fp_distinguishes_methane_ethane():
    a = morgan_fingerprint(parse_sanitized("C"), radius=1)
    b = morgan_fingerprint(parse_sanitized("CC"), radius=1)
    assert a != b


def test_fp_benzene_on_count():
    fp = morgan_fingerprint(parse_sanitized("c1ccccc1"), radius=2, width=2048)
    assert 1 <= fp.on_count <= 12


def test_fp_permutation_invariance(corpus_smiles):
    rng = random.Random(3)
    for s in rng.sample(corpus_smiles, 15):
        ref = morgan_fingerprint(parse_sanitized(s))
        for seed in range(5):
            shuffled = morgan_fingerprint(parse_sanitized(
                shuffle_smiles(s, seed)))
            assert shuffled == ref, s


def test_tanimoto_identity_and_bounds(corpus_mols):
    fps = [morgan_fingerprint(m) for m in corpus_mols[:20]]
    for a in fps:
        assert tanimoto(a, a) == 1.0
    for a, b in zip(fps, fps[1:]):
        t = tanimoto(a, b)
        assert 0.0 <= t <= 1.0
        assert t == tanimoto(b, a)


def test_tanimoto_width_mismatch():
    a = morgan_fingerprint(parse_sanitized("C"), width=1024)
    b = morgan_fingerprint(parse_sanitized("C"), width=2048)
    with pytest.raises(WidthMismatch):
        tanimoto(a, b)


def test_isomorphic_basics():
    assert isomorphic(parse_sanitized("OCC"), parse_sanitized("CCO"))
    assert not isomorphic(parse_sanitized("CCO"), parse_sanitized("COC"))
