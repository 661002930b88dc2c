import math

import pytest

from molbench import descriptors as D
from molbench.errors import SmartsError
from molbench.smiles import parse_sanitized


@pytest.fixture(scope="module")
def tables():
    return D.default_tables()


def mol(s):
    return parse_sanitized(s)


# logP checks: table arithmetic verified against the published
# atom-contribution scheme on these probes
LOGP_CASES = {
    "C": 0.6361,
    "CCO": -0.0014,
    "c1ccccc1": 1.6866,
    "Oc1ccccc1": 1.3922,
    "CC(=O)O": 0.0909,
    "OC(=O)c1ccccc1": 1.3848,
}


@pytest.mark.parametrize("smiles,expected", sorted(LOGP_CASES.items()))
def test_crippen_logp(smiles, expected, tables):
    assert D.crippen_logp(mol(smiles), tables) == pytest.approx(
        expected, abs=1e-3)


def test_crippen_untyped_counter(tables):
    value, types, untyped = D.crippen_logp_detailed(mol("CCO"), tables)
    assert untyped == 0
    assert types == ["C1", "C3", "O2"]


# TPSA: sums of the pinned per-type contributions
TPSA_CASES = {
    "c1ccccc1": 0.0,
    "CCO": 20.23,                      # OH-s
    "Nc1ccccc1": 26.02,                # NH2-s
    "c1ccncc1": 12.89,                 # n-aa
    "CC(=O)Oc1ccccc1C(=O)O": 63.60,    # 2 O-d + O-ss + OH-s
    "O=[N+]([O-])c1ccccc1": 43.14,     # N+-ssd + O-d + O--s
    "CN(C)C": 3.24,                    # N-sss
    "C1CN1": 21.94,                    # NH-ss-r3
}


@pytest.mark.parametrize("smiles,expected", sorted(TPSA_CASES.items()))
def test_tpsa(smiles, expected, tables):
    assert D.tpsa(mol(smiles), tables) == pytest.approx(expected, abs=1e-6)


def test_features_benzene(tables):
    hbd, hba, rot, rings, alerts, mw = D.count_features(mol("c1ccccc1"),
                                                        tables)
    assert (hbd, hba, rot, rings, alerts) == (0, 0, 0, 1, 0)
    assert mw == pytest.approx(78.114, abs=0.01)


def test_features_aspirin(tables):
    hbd, hba, rot, rings, alerts, mw = D.count_features(
        mol("CC(=O)Oc1ccccc1C(=O)O"), tables)
    assert hbd == 1
    assert hba == 4
    assert rot == 3
    assert rings == 1
    assert mw == pytest.approx(180.159, abs=0.01)


def test_rotatable_bond_cases(tables):
    pattern = tables.feature_patterns["rotatable"]
    from molbench.smarts import count_matches
    for smiles, n in (("CCO", 0), ("CCCC", 1), ("CCCCCC", 3),
                      ("c1ccccc1c1ccccc1", 1), ("CC#CC", 0)):
        assert count_matches(pattern, mol(smiles)) == n, smiles


def test_alert_hits(tables):
    for smiles, expect_hit in (("O=[N+]([O-])C", True), ("CC(=O)Cl", True),
                               ("CCBr", True), ("C1CO1", True),
                               ("CCO", False), ("c1ccccc1", False)):
        alerts = D.count_features(mol(smiles), tables)[4]
        assert (alerts > 0) == expect_hit, smiles


def test_all_alert_patterns_parse(tables):
    assert len(tables.alert_patterns) >= 30


def test_sa_score_range(corpus_smiles, tables):
    for s in corpus_smiles[:60]:
        score = D.sa_score(mol(s), tables)
        assert 1.0 <= score <= 10.0, s


def test_sa_complexity_ordering(tables):
    simple = D.sa_score(mol("CCO"), tables)
    bridged = D.sa_score(
        mol("CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O"), tables)
    assert bridged > simple


def test_spiro_and_bridgeheads():
    assert D.spiro_and_bridgehead_counts(mol("C1CCC2(CC1)CCCC2")) == (1, 0)
    assert D.spiro_and_bridgehead_counts(mol("C1CC2CCC1C2")) == (0, 2)
    assert D.spiro_and_bridgehead_counts(
        mol("C1C2CC3CC1CC(C2)C3")) == (0, 4)
    assert D.spiro_and_bridgehead_counts(mol("c1ccc2ccccc2c1")) == (0, 0)


def test_np_score_direction(tables):
    sugar = D.np_score(mol("OCC1OC(O)C(O)C(O)C1O"), tables)
    aryl_halide = D.np_score(mol("Clc1ccc(Cl)cc1"), tables)
    assert sugar > aryl_halide
    assert -5.0 <= sugar <= 5.0
    assert -5.0 <= aryl_halide <= 5.0


def test_qed_range(corpus_smiles, tables):
    for s in corpus_smiles[:40]:
        assert 0.0 < D.qed(mol(s), tables) < 1.0, s


def test_qed_geometric_mean_identity():
    assert D.weighted_geometric_mean([0.5] * 8, [0.66, 0.46, 0.05, 0.61,
                                                 0.06, 0.65, 0.48, 0.95]) \
        == pytest.approx(0.5)


def test_qed_monotone_in_each_desirability():
    weights = [1.0] * 8
    base = [0.5] * 8
    for i in range(8):
        higher = list(base)
        higher[i] = 0.9
        assert D.weighted_geometric_mean(higher, weights) > \
            D.weighted_geometric_mean(base, weights)


def test_normalize_defaults():
    raw = D.RawDescriptors(logp=6.0429063424, tpsa=0, mw=0, hbd=0, hba=0,
                           rot_bonds=0, aromatic_rings=0, alerts=0,
                           sa_raw=1.5, qed_raw=0.5, np_raw=1.0)
    np_pct, sol_pct, sas_pct, qed_pct = D.normalize(raw)
    assert np_pct == 100.0
    assert sol_pct == 100.0
    assert sas_pct == 100.0   # inverted: lowest raw SA is best
    assert qed_pct == 50.0


def test_normalize_clipping():
    raw = D.RawDescriptors(logp=99, tpsa=0, mw=0, hbd=0, hba=0, rot_bonds=0,
                           aromatic_rings=0, alerts=0, sa_raw=9.9,
                           qed_raw=1.0, np_raw=-9)
    np_pct, sol_pct, sas_pct, qed_pct = D.normalize(raw)
    assert (np_pct, sol_pct, sas_pct, qed_pct) == (0.0, 100.0, 0.0, 100.0)


def test_comment_stripping_preserves_hash_primitives():
    assert D._strip_comment("[#6;+,-]  # carbanion") == "[#6;+,-]  "
    assert D._strip_comment("C#C[CH0]=O") == "C#C[CH0]=O"
    assert D._strip_comment("# whole-line comment") == ""


def test_table_hashes_recorded(tables):
    assert set(tables.content_hashes) >= {
        "crippen_logp.tsv", "tpsa.tsv", "qed_params.tsv", "alerts.smarts",
        "feature_patterns.tsv", "sa_fragments.tsv", "np_fragments.tsv"}
