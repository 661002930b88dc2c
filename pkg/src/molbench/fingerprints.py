"""Circular (Morgan-style) fingerprints and Tanimoto similarity."""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from . import kernels
from .errors import WidthMismatch
from .molgraph import Molecule
from .periodic import ATOMIC_NUMBER

_AROMATIC_BOND_KEY = 4


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bit vector over hashed circular environments."""

    words: tuple[int, ...]  # width/64 packed uint64 words
    width: int
    radius: int
    on_count: int = field(compare=False)

    def bit(self, i: int) -> bool:
        return bool(self.words[i >> 6] >> (i & 63) & 1)

    def on_bits(self) -> list[int]:
        return [i for i in range(self.width) if self.bit(i)]


def _atom_init_codes(mol: Molecule) -> array:
    in_ring, _ = mol.ring_membership()
    codes = array("Q", bytes(8 * len(mol.atoms)))
    for i, atom in enumerate(mol.atoms):
        codes[i] = kernels.hash64((
            ATOMIC_NUMBER[atom.element],
            atom.formal_charge & kernels.MASK64,
            mol.degree(i),
            mol.implicit_hydrogens(i),
            int(in_ring[i]),
            int(atom.aromatic),
        ))
    return codes


def _csr(mol: Molecule) -> tuple[array, array, array]:
    starts = array("I", [0])
    nbr = array("I")
    keys = array("B")
    for i in range(len(mol.atoms)):
        for bi in mol.adjacency[i]:
            bond = mol.bonds[bi]
            nbr.append(bond.other(i))
            keys.append(_AROMATIC_BOND_KEY if bond.aromatic else bond.order)
        starts.append(len(nbr))
    return starts, nbr, keys


def morgan_environments(mol: Molecule, radius: int = 2) -> dict[int, int]:
    """Sparse counted environments: hash -> occurrence count.

    Every atom contributes one environment per radius 0..r; this is the
    substrate for both the folded fingerprint and the fragment-score tables.
    """
    codes = _atom_init_codes(mol)
    starts, nbr, keys = _csr(mol)
    counts: dict[int, int] = {}
    for c in codes:
        counts[c] = counts.get(c, 0) + 1
    for _ in range(radius):
        codes = kernels.morgan_round(codes, starts, nbr, keys)
        for c in codes:
            counts[c] = counts.get(c, 0) + 1
    return counts


def morgan_fingerprint(mol: Molecule, radius: int = 2,
                       width: int = 2048) -> Fingerprint:
    if width % 64:
        raise ValueError("width must be a multiple of 64")
    words = array("Q", bytes(width // 8))
    for env in morgan_environments(mol, radius):
        bit = env % width
        words[bit >> 6] |= 1 << (bit & 63)
    on = kernels.popcount_words(words)
    return Fingerprint(tuple(words), width, radius, on)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; two empty fingerprints count as identical."""
    if a.width != b.width or a.radius != b.radius:
        raise WidthMismatch(
            f"fingerprint params differ: {a.width}/{a.radius} vs {b.width}/{b.radius}")
    n_and, n_or = kernels.and_or_counts(array("Q", a.words), array("Q", b.words))
    if n_or == 0:
        return 1.0
    return n_and / n_or
