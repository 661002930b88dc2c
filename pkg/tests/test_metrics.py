import math
import random

import pytest

from molbench import metrics as M
from molbench.errors import EmptyValidSet
from molbench.smiles import canonicalize, parse_sanitized


def batch(*outputs):
    return M.GenerationBatch.from_outputs(list(outputs))


def refs(*train):
    return M.ReferenceSets.from_training([parse_sanitized(s) for s in train])


def test_validity_examples():
    _, pct, _ = M.validity(batch("C", "C(", "CO"))
    assert pct == pytest.approx(66.67, abs=0.01)

    _, pct, std = M.validity(batch("C", "CC", "CCC"))
    assert (pct, std) == (100.0, 0.0)

    _, pct, std = M.validity(batch("C", "C", "C", "C(C)(C)(C)(C)C"))
    assert pct == 75.0
    assert std == pytest.approx(100 * math.sqrt(0.75 * 0.25))


def test_validity_empty_is_na():
    _, pct, std = M.validity(batch())
    assert pct is None and std is None


def test_novelty_examples():
    r = refs("CCO", "CCC")
    assert M.novelty(batch("CCO", "OCC"), r)[0] == 0.0
    assert M.novelty(batch("CCN", "CCCl"), r)[0] == 100.0
    assert M.novelty(batch("CCO", "CCC", "OCC", "CCN"), r)[0] == 25.0


def test_novelty_ignores_invalid():
    r = refs("CCO")
    pct, _ = M.novelty(batch("CCO", "xxx(", "zzz)"), r)
    assert pct == 0.0


def test_novelty_empty_valid_set():
    with pytest.raises(EmptyValidSet):
        M.novelty(batch("nope("), refs("CCO"))


def test_uniqueness_examples():
    assert M.uniqueness(batch("CCO", "OCC", "C")) == pytest.approx(200 / 3)
    assert M.uniqueness(batch(*["CCO"] * 5)) == 20.0
    assert M.uniqueness(batch("C", "CC", "CCC")) == 100.0


def test_reconstruction_examples():
    target = [canonicalize("CCO")]
    assert M.reconstruction(target, [["CCO"] * 20]) == (100.0, 0.0)
    assert M.reconstruction(target, [["garbage("] * 20])[0] == 0.0
    pct, _ = M.reconstruction(target, [["OCC"] + ["C"] * 19])
    assert pct == 5.0


def test_reconstruction_canonical_equality():
    # re-ordered but equivalent SMILES counts as reconstructed
    assert M.reconstruction([canonicalize("CCO")], [["OCC"]])[0] == 100.0


def test_diversity_self_zero():
    r = refs("CCO")
    assert M.diversity(batch("CCO"), r, k=1, seed=1) == (0.0, 0.0)


def test_diversity_disjoint_high():
    r = refs("CCCCCCCC")
    pct, _ = M.diversity(batch("O=S=O"), r, k=1, seed=1)
    assert pct == 100.0


def test_diversity_deterministic_and_order_invariant():
    r = refs("CCO", "CCC", "c1ccccc1", "CCN")
    a = M.diversity(batch("CCO", "CCN", "CCCC"), r, k=7, seed=3)
    b = M.diversity(batch("CCCC", "CCO", "CCN"), r, k=7, seed=3)
    assert a == b


def test_property_metrics_single_molecule_std_zero():
    out = M.property_metrics(batch("CCO"))
    for name, (mean, std) in out.items():
        assert std == 0.0
        assert 0.0 <= mean <= 100.0


def test_order_invariance_all_metrics():
    r = refs("CCO", "CCC", "c1ccccc1")
    items = ["CCO", "CCN", "bad(", "c1ccccc1", "CCCC", "CC(=O)O"]
    shuffled = list(items)
    random.Random(4).shuffle(shuffled)
    a, b = batch(*items), batch(*shuffled)
    assert M.validity(a)[1:] == M.validity(b)[1:]
    assert M.novelty(a, r) == M.novelty(b, r)
    assert M.uniqueness(a) == M.uniqueness(b)
    assert M.diversity(a, r, k=5, seed=9) == M.diversity(b, r, k=5, seed=9)
    assert M.property_metrics(a) == M.property_metrics(b)


def test_novelty_monotone_under_training_molecule():
    r = refs("CCO", "CCC")
    base = batch("CCN", "CCCl")
    extended = batch("CCN", "CCCl", "CCO")
    assert M.novelty(extended, r)[0] <= M.novelty(base, r)[0]


CANNED = ["C", "CC", "CCC", "CCO", "CCN", "c1ccccc1", "CC(=O)O", "C1CC1",
          "CCCl", "COC"]


def brute_force(outputs, train_canon):
    canon = []
    for s in outputs:
        try:
            canon.append(canonicalize(s).text)
        except Exception:
            canon.append(None)
    valid = [c for c in canon if c is not None]
    v = 100 * len(valid) / len(outputs) if outputs else None
    u = 100 * len(set(valid)) / len(valid) if valid else None
    n = 100 * sum(1 for c in valid if c not in train_canon) / len(valid) \
        if valid else None
    return v, u, n


def test_set_semantics_fuzz_against_naive_scan():
    rng = random.Random(11)
    train = {canonicalize(s).text for s in CANNED[:5]}
    r = M.ReferenceSets(frozenset(train), ())
    for _ in range(150):
        outputs = [rng.choice(CANNED + ["bad(", ")(", ""])
                   for _ in range(rng.randrange(1, 40))]
        b = batch(*outputs)
        v_naive, u_naive, n_naive = brute_force(outputs, train)
        assert M.validity(b)[1] == pytest.approx(v_naive)
        if u_naive is None:
            with pytest.raises(EmptyValidSet):
                M.uniqueness(b)
        else:
            assert M.uniqueness(b) == pytest.approx(u_naive)
            assert M.novelty(b, r)[0] == pytest.approx(n_naive)


def test_valid_count_accounting():
    b = batch("C", "CC", "bad(", "CCC")
    flags, pct, _ = M.validity(b)
    assert sum(flags) == len(b) * pct / 100
