"""SMILES reading, writing and canonicalization.

The canonical form is produced by iterative invariant refinement over
(element, charge, degree, hydrogen count, ring membership, aromaticity),
with remaining ties resolved by individualize-and-refine branching that
keeps the lexicographically smallest emission.  It is internally consistent
and permutation invariant, but deliberately not aligned with any other
toolkit's canonical strings.  Stereo markers and isotopes survive
`write()` round-trips but are excluded from the canonical identity key.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import periodic
from .errors import InvalidMolecule, KekulizationError, ParseError, ValenceError
from .molgraph import (BOND_DOUBLE, BOND_SINGLE, BOND_TRIPLE, Atom, Molecule,
                       sanitize)

_AROMATIC_ORGANIC = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
_AROMATIC_BRACKET = dict(_AROMATIC_ORGANIC, **{"se": "Se", "as": "As"})
_BOND_CHARS = {"-": (BOND_SINGLE, False), "=": (BOND_DOUBLE, False),
               "#": (BOND_TRIPLE, False), ":": (BOND_SINGLE, True),
               "/": (BOND_SINGLE, False), "\\": (BOND_SINGLE, False)}


@dataclass(frozen=True)
class CanonicalSmiles:
    """Canonical identity key; only `canonicalize` should construct these."""

    text: str

    def __str__(self) -> str:
        return self.text


# -- parser ----------------------------------------------------------------

def _parse_bracket_atom(text: str, pos: int) -> tuple[Atom, int]:
    """Parse from the char after '[' up to and including ']'."""
    start = pos
    n = len(text)

    isotope = None
    digits = ""
    while pos < n and text[pos].isdigit():
        digits += text[pos]
        pos += 1
    if digits:
        isotope = int(digits)
        if isotope <= 0:
            raise ParseError("isotope must be positive", start)

    aromatic = False
    element = None
    for sym in ("se", "as"):
        if text.startswith(sym, pos):
            element, aromatic = _AROMATIC_BRACKET[sym], True
            pos += 2
            break
    if element is None and pos < n:
        two = text[pos:pos + 2]
        if two in periodic.SUPPORTED_ELEMENTS:
            element = two
            pos += 2
        elif text[pos] in periodic.SUPPORTED_ELEMENTS:
            element = text[pos]
            pos += 1
        elif text[pos] in _AROMATIC_ORGANIC:
            element, aromatic = _AROMATIC_ORGANIC[text[pos]], True
            pos += 1
    if element is None:
        raise ParseError("unknown element in bracket atom", pos)

    stereo = None
    if pos < n and text[pos] == "@":
        pos += 1
        if pos < n and text[pos] == "@":
            stereo = "@@"
            pos += 1
        else:
            stereo = "@"

    hcount = 0
    if pos < n and text[pos] == "H":
        pos += 1
        digits = ""
        while pos < n and text[pos].isdigit():
            digits += text[pos]
            pos += 1
        hcount = int(digits) if digits else 1

    charge = 0
    if pos < n and text[pos] in "+-":
        sign = 1 if text[pos] == "+" else -1
        pos += 1
        if pos < n and text[pos].isdigit():
            charge = sign * int(text[pos])
            pos += 1
        else:
            charge = sign
            while pos < n and text[pos] in "+-":  # archaic ++/-- form
                if (text[pos] == "+") != (sign > 0):
                    break
                charge += sign
                pos += 1
    if abs(charge) > periodic.MAX_FORMAL_CHARGE:
        raise ParseError("formal charge out of range", start)

    if pos < n and text[pos] == ":":  # atom class, parsed and discarded
        pos += 1
        if pos >= n or not text[pos].isdigit():
            raise ParseError("malformed atom class", pos)
        while pos < n and text[pos].isdigit():
            pos += 1

    if pos >= n or text[pos] != "]":
        raise ParseError("malformed bracket atom", start)
    atom = Atom(element, charge, hcount, isotope, aromatic, stereo)
    return atom, pos + 1


def parse(text: str) -> Molecule:
    """Parse a SMILES string into an unsanitized Molecule.

    Raises ParseError with a byte offset for any grammar violation.
    """
    if not text or not text.strip():
        raise ParseError("empty input", 0)
    mol = Molecule()
    prev: int | None = None           # previous atom index
    pending: tuple[int, bool, str | None] | None = None  # (order, aromatic, stereo)
    pending_offset = 0
    branch_stack: list[tuple[int, int]] = []  # (atom index, '(' offset)
    ring_open: dict[int, tuple[int, tuple | None, int]] = {}  # num -> (atom, bond, offset)
    pos = 0
    n = len(text)

    def attach(idx: int, offset: int):
        nonlocal prev, pending
        if prev is not None:
            if pending is not None:
                order, arom, stereo = pending
            else:
                arom = mol.atoms[prev].aromatic and mol.atoms[idx].aromatic
                order, stereo = BOND_SINGLE, None
            try:
                mol.add_bond(prev, idx, order, arom, stereo)
            except ValueError as exc:
                raise ParseError(str(exc), offset) from None
        elif pending is not None:
            raise ParseError("bond with no preceding atom", pending_offset)
        prev = idx
        pending = None

    def close_ring(num: int, offset: int):
        nonlocal pending
        if prev is None:
            raise ParseError("ring bond before any atom", offset)
        if num in ring_open:
            first, first_bond, first_off = ring_open.pop(num)
            if first == prev:
                raise ParseError("ring bond closes on itself", offset)
            here = pending
            if here is not None and first_bond is not None and here != first_bond:
                raise ParseError("conflicting ring-closure bond orders", offset)
            spec = here or first_bond
            if spec is not None:
                order, arom, stereo = spec
            else:
                arom = mol.atoms[first].aromatic and mol.atoms[prev].aromatic
                order, stereo = BOND_SINGLE, None
            try:
                mol.add_bond(first, prev, order, arom, stereo)
            except ValueError as exc:
                raise ParseError(str(exc), offset) from None
        else:
            ring_open[num] = (prev, pending, offset)
        pending = None

    while pos < n:
        ch = text[pos]
        if ch == "[":
            atom, new_pos = _parse_bracket_atom(text, pos + 1)
            idx = mol.add_atom(atom)
            attach(idx, pos)
            pos = new_pos
        elif ch in _BOND_CHARS:
            if pending is not None:
                raise ParseError("two bond symbols in a row", pos)
            order, arom = _BOND_CHARS[ch]
            stereo = ch if ch in "/\\" else None
            pending = (order, arom, stereo)
            pending_offset = pos
            pos += 1
        elif ch == "(":
            if prev is None:
                raise ParseError("branch before any atom", pos)
            branch_stack.append((prev, pos))
            pos += 1
        elif ch == ")":
            if pending is not None:
                raise ParseError("dangling bond before ')'", pending_offset)
            if not branch_stack:
                raise ParseError("unmatched ')'", pos)
            prev = branch_stack.pop()[0]
            pos += 1
        elif ch.isdigit():
            close_ring(int(ch), pos)
            pos += 1
        elif ch == "%":
            if pos + 2 >= n or not text[pos + 1:pos + 3].isdigit():
                raise ParseError("malformed %nn ring closure", pos)
            close_ring(int(text[pos + 1:pos + 3]), pos)
            pos += 3
        elif ch == ".":
            if pending is not None:
                raise ParseError("bond before '.'", pending_offset)
            if prev is None:
                raise ParseError("leading '.'", pos)
            prev = None
            pos += 1
        else:
            # organic-subset atom
            matched = None
            two = text[pos:pos + 2]
            if two in ("Cl", "Br"):
                matched = Atom(two)
                width = 2
            elif ch in periodic.ORGANIC_SUBSET and ch.isupper():
                matched = Atom(ch)
                width = 1
            elif ch in _AROMATIC_ORGANIC:
                matched = Atom(_AROMATIC_ORGANIC[ch], aromatic=True)
                width = 1
            if matched is None:
                raise ParseError(f"unexpected character {ch!r}", pos)
            idx = mol.add_atom(matched)
            attach(idx, pos)
            pos += width

    if branch_stack:
        raise ParseError("unclosed branch", branch_stack[-1][1])
    if pending is not None:
        raise ParseError("trailing bond symbol", pending_offset)
    if ring_open:
        num, (_, _, off) = next(iter(ring_open.items()))
        raise ParseError(f"dangling ring bond {num}", off)
    if not mol.atoms:
        raise ParseError("no atoms", 0)
    return mol


def parse_sanitized(text: str) -> Molecule:
    """Parse and sanitize, folding every failure into InvalidMolecule."""
    try:
        return sanitize(parse(text))
    except (ParseError, KekulizationError, ValenceError) as exc:
        raise InvalidMolecule(str(exc), exc) from exc


# -- writer ----------------------------------------------------------------

def _bare_hydrogens(mol: Molecule, idx: int) -> int:
    """H count a bracket-free emission would get on re-parse."""
    order_sum = mol.bond_order_sum(idx)
    for v in periodic.allowed_valences(mol.atoms[idx].element, 0):
        if v >= order_sum:
            return v - order_sum
    return 0


def _needs_bracket(mol: Molecule, idx: int, annotations: bool) -> bool:
    atom = mol.atoms[idx]
    if atom.element not in periodic.ORGANIC_SUBSET:
        return True
    if atom.formal_charge != 0:
        return True
    if annotations and (atom.isotope is not None or atom.stereo is not None):
        return True
    actual = mol.implicit_hydrogens(idx)
    if atom.aromatic and atom.element in ("N", "P") and actual > 0:
        return True  # pyrrole-type H is load-bearing for kekulization
    return actual != _bare_hydrogens(mol, idx)


def _atom_token(mol: Molecule, idx: int, annotations: bool) -> str:
    atom = mol.atoms[idx]
    sym = atom.element.lower() if atom.aromatic else atom.element
    if not _needs_bracket(mol, idx, annotations):
        return sym
    parts = ["["]
    if annotations and atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(sym)
    if annotations and atom.stereo:
        parts.append(atom.stereo)
    h = mol.implicit_hydrogens(idx)
    if h == 1:
        parts.append("H")
    elif h > 1:
        parts.append(f"H{h}")
    q = atom.formal_charge
    if q == 1:
        parts.append("+")
    elif q == -1:
        parts.append("-")
    elif q > 1:
        parts.append(f"+{q}")
    elif q < -1:
        parts.append(f"-{-q}")
    parts.append("]")
    return "".join(parts)


def _bond_token(mol: Molecule, bond, annotations: bool) -> str:
    if bond.aromatic:
        return ""
    if bond.order == BOND_DOUBLE:
        return "="
    if bond.order == BOND_TRIPLE:
        return "#"
    if annotations and bond.stereo:
        return bond.stereo
    if mol.atoms[bond.a].aromatic and mol.atoms[bond.b].aromatic:
        return "-"  # single bond between two aromatic systems
    return ""


def write(mol: Molecule, order: list[int] | None = None,
          annotations: bool = True) -> str:
    """Emit SMILES; `order` (a rank per atom) fixes traversal for canonical
    output.  The result re-parses to an isomorphic molecule."""
    if not mol.sanitized:
        raise ValueError("write requires a sanitized molecule")
    n = len(mol.atoms)
    rank = order if order is not None else list(range(n))

    visited = [False] * n
    ring_number = {}           # bond index -> closure number
    free_numbers = list(range(99, 0, -1))
    tokens: list[str] = []

    def nbr_order(idx):
        pairs = [(rank[mol.bonds[bi].other(idx)], bi) for bi in mol.adjacency[idx]]
        return [bi for _, bi in sorted(pairs)]

    # First pass: classify edges as tree or ring-closure, in emission order.
    closure_bonds: set[int] = set()

    def classify(start):
        seen_edges = set()
        stack = [start]
        visited[start] = True
        parent_edge = {start: None}
        order_stack = [(start, iter(nbr_order(start)))]
        while order_stack:
            v, it = order_stack[-1]
            advanced = False
            for bi in it:
                if bi in seen_edges:
                    continue
                seen_edges.add(bi)
                w = mol.bonds[bi].other(v)
                if visited[w]:
                    closure_bonds.add(bi)
                else:
                    visited[w] = True
                    order_stack.append((w, iter(nbr_order(w))))
                    advanced = True
                    break
            if not advanced:
                order_stack.pop()

    def emit(start):
        stack = [(start, None)]  # (atom, incoming bond index)
        # Recursive emission via explicit stack of generators.
        out = []

        def walk(v, in_bond):
            out.append(_atom_token(mol, v, annotations))
            # ring closures opening/closing at this atom
            for bi in nbr_order(v):
                if bi in closure_bonds:
                    if bi in ring_number:
                        num = ring_number.pop(bi)
                        out.append(_closure_token(bi, num))
                        free_numbers.append(num)
                    else:
                        num = free_numbers.pop()
                        ring_number[bi] = num
                        out.append(_bond_token(mol, mol.bonds[bi], annotations)
                                   + _digit_token(num))
            children = [bi for bi in nbr_order(v)
                        if bi != in_bond and bi not in closure_bonds
                        and not emitted[mol.bonds[bi].other(v)]]
            for k, bi in enumerate(children):
                w = mol.bonds[bi].other(v)
                if emitted[w]:
                    continue
                emitted[w] = True
                last = k == len(children) - 1
                if not last:
                    out.append("(")
                out.append(_bond_token(mol, mol.bonds[bi], annotations))
                walk(w, bi)
                if not last:
                    out.append(")")

        def _closure_token(bi, num):
            return _digit_token(num)

        def _digit_token(num):
            return str(num) if num < 10 else f"%{num:02d}"

        emitted[start] = True
        walk(start, None)
        return "".join(out)

    emitted = [False] * n
    components = mol.components()
    components.sort(key=lambda comp: min(rank[a] for a in comp))
    pieces = []
    for comp in components:
        start = min(comp, key=lambda a: rank[a])
        classify(start)
        pieces.append(emit(start))
    return ".".join(pieces)


# -- canonicalization ------------------------------------------------------

def _initial_invariants(mol: Molecule) -> list[tuple]:
    in_ring, _ = mol.ring_membership()
    out = []
    for i, atom in enumerate(mol.atoms):
        out.append((periodic.ATOMIC_NUMBER[atom.element],
                    atom.formal_charge,
                    mol.degree(i),
                    mol.implicit_hydrogens(i),
                    in_ring[i],
                    atom.aromatic))
    return out


def _dense_ranks(keys: list) -> list[int]:
    lookup = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [lookup[k] for k in keys]


def _refine(mol: Molecule, ranks: list[int]) -> list[int]:
    n = len(ranks)
    while True:
        keys = []
        for i in range(n):
            nb = sorted(
                ((4 if mol.bonds[bi].aromatic else mol.bonds[bi].order),
                 ranks[mol.bonds[bi].other(i)])
                for bi in mol.adjacency[i])
            keys.append((ranks[i], tuple(nb)))
        new = _dense_ranks(keys)
        if new == ranks:
            return ranks
        ranks = new


def canonical_ranks(mol: Molecule) -> list[int]:
    """Total atom order underlying the canonical emission."""
    _, ranks = _canonical_core(mol)
    return ranks


def _canonical_core(mol: Molecule) -> tuple[str, list[int]]:
    ranks = _refine(mol, _dense_ranks(_initial_invariants(mol)))
    best: list = [None, None]  # [string, ranks]

    def descend(ranks):
        cells: dict[int, list[int]] = {}
        for i, r in enumerate(ranks):
            cells.setdefault(r, []).append(i)
        tied = sorted(r for r, atoms in cells.items() if len(atoms) > 1)
        if not tied:
            s = write(mol, order=ranks, annotations=False)
            if best[0] is None or s < best[0]:
                best[0], best[1] = s, list(ranks)
            return
        target = cells[tied[0]]
        for chosen in target:
            keys = [(r, 0 if i == chosen else 1) for i, r in enumerate(ranks)]
            descend(_refine(mol, _dense_ranks(keys)))

    descend(ranks)
    return best[0], best[1]


def canonicalize(text: str) -> CanonicalSmiles:
    """Canonical identity key of a SMILES string; permutation invariant."""
    mol = parse_sanitized(text)
    return canonicalize_mol(mol)


def canonicalize_mol(mol: Molecule) -> CanonicalSmiles:
    s, _ = _canonical_core(mol)
    return CanonicalSmiles(s)
