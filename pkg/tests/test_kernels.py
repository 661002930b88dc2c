import random
from array import array

import pytest

from molbench import kernels
from molbench.kernels import _pure

try:
    from molbench.kernels import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None,
                               reason="compiled extension not built")


def random_csr(rng, n_atoms=50):
    edges = {tuple(sorted(rng.sample(range(n_atoms), 2)))
             for _ in range(n_atoms * 2)}
    adj = [[] for _ in range(n_atoms)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    starts, nbr, keys = array("I", [0]), array("I"), array("B")
    for i in range(n_atoms):
        for j in adj[i]:
            nbr.append(j)
            keys.append(rng.choice([1, 2, 3, 4]))
        starts.append(len(nbr))
    codes = array("Q", [rng.getrandbits(64) for _ in range(n_atoms)])
    return codes, starts, nbr, keys


def test_mix64_is_deterministic_and_bounded():
    h = _pure.mix64(12345, 67890)
    assert h == _pure.mix64(12345, 67890)
    assert 0 <= h < 1 << 64


def test_mix64_sensitivity():
    base = _pure.mix64(1, 1)
    assert base != _pure.mix64(1, 2)
    assert base != _pure.mix64(2, 1)


def test_hash64_order_sensitive():
    assert _pure.hash64((1, 2, 3)) != _pure.hash64((3, 2, 1))


def test_popcount_words():
    assert _pure.popcount_words(array("Q", [0])) == 0
    assert _pure.popcount_words(array("Q", [0b1011, 1 << 63])) == 4


def test_and_or_counts():
    a = array("Q", [0b1100, 0xF])
    b = array("Q", [0b1010, 0xF])
    assert _pure.and_or_counts(a, b) == (5, 7)


@needs_ext
def test_backend_is_compiled():
    assert kernels.BACKEND == "cython"


@needs_ext
def test_mix64_parity():
    rng = random.Random(0)
    for _ in range(2000):
        h, v = rng.getrandbits(64), rng.getrandbits(64)
        assert _pure.mix64(h, v) == _speedups.mix64(h, v)


@needs_ext
def test_morgan_round_parity():
    rng = random.Random(1)
    for _ in range(20):
        codes, starts, nbr, keys = random_csr(rng)
        p = _pure.morgan_round(codes, starts, nbr, keys)
        c = _speedups.morgan_round(codes, starts, nbr, keys)
        assert list(p) == list(c)


@needs_ext
def test_popcount_parity():
    rng = random.Random(2)
    words = array("Q", [rng.getrandbits(64) for _ in range(512)])
    assert _pure.popcount_words(words) == _speedups.popcount_words(words)
    other = array("Q", [rng.getrandbits(64) for _ in range(512)])
    assert _pure.and_or_counts(words, other) == \
        _speedups.and_or_counts(words, other)
