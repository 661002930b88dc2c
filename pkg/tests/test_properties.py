"""Property-based tests (hypothesis)."""

import hypothesis.strategies as st
from hypothesis import given, settings

from conftest import read_corpus, shuffle_smiles
from molbench.descriptors import NormalizationSpec, RawDescriptors, normalize
from molbench.errors import ParseError
from molbench.fingerprints import morgan_fingerprint, tanimoto
from molbench.kernels import _pure
from molbench.smiles import canonicalize, parse, parse_sanitized

from importlib import resources

_CORPUS = read_corpus(resources.files("molbench.data") / "corpus_synthetic.smi")


@given(st.integers(0, (1 << 64) - 1), st.integers(0, (1 << 64) - 1))
def test_mix64_deterministic_and_in_range(h, v):
    out = _pure.mix64(h, v)
    assert out == _pure.mix64(h, v)
    assert 0 <= out < 1 << 64


@given(st.text(alphabet="CNOScnos()[]=#123456789%+-@/\\.HBrl", max_size=25))
@settings(max_examples=300, deadline=None)
def test_parse_totality(text):
    try:
        parse(text)
    except ParseError:
        pass


@given(st.sampled_from(_CORPUS), st.integers(0, 1 << 30))
@settings(max_examples=120, deadline=None)
def test_canonical_permutation_invariance(smiles, seed):
    assert canonicalize(shuffle_smiles(smiles, seed)) == canonicalize(smiles)


@given(st.sampled_from(_CORPUS), st.sampled_from(_CORPUS))
@settings(max_examples=60, deadline=None)
def test_tanimoto_symmetric_bounded(a, b):
    fa = morgan_fingerprint(parse_sanitized(a))
    fb = morgan_fingerprint(parse_sanitized(b))
    t = tanimoto(fa, fb)
    assert 0.0 <= t <= 1.0
    assert t == tanimoto(fb, fa)
    if a == b:
        assert t == 1.0


@given(st.floats(-50, 50, allow_nan=False),
       st.floats(1, 10, allow_nan=False),
       st.floats(0, 1, allow_nan=False),
       st.floats(-10, 10, allow_nan=False))
def test_normalize_always_in_percentage_range(logp, sa, qed, np_raw):
    raw = RawDescriptors(logp=logp, tpsa=0, mw=0, hbd=0, hba=0, rot_bonds=0,
                         aromatic_rings=0, alerts=0, sa_raw=sa, qed_raw=qed,
                         np_raw=np_raw)
    for pct in normalize(raw, NormalizationSpec()):
        assert 0.0 <= pct <= 100.0
