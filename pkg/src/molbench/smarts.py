"""SMARTS-subset pattern engine over molecular graphs.

Supports the primitives needed by the shipped descriptor definitions and
alert set: element (symbol or #n), aromatic/aliphatic, charge, degree (D),
H count (H/h), connectivity (X), valence (v), ring membership (R), ring
size (r), negation, &/,/; composition and depth-1 recursive $(...)
environments.  Anything outside the subset raises SmartsError at parse
time; silent mis-matching is never an option.  Embedding search is a
VF2-style backtracking over candidate extensions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SmartsError
from .molgraph import BOND_DOUBLE, BOND_SINGLE, BOND_TRIPLE, Molecule
from .periodic import ATOMIC_NUMBER, SYMBOL_BY_NUMBER

_TWO_LETTER = ("Cl", "Br", "Si", "Se", "As")
_AROMATIC_LOWER = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S",
                   "se": "Se", "as": "As"}


class MatchContext:
    """Cached per-molecule lookups used by predicate evaluation."""

    def __init__(self, mol: Molecule):
        self.mol = mol
        in_ring, ring_bonds = mol.ring_membership()
        self.in_ring = in_ring
        self.ring_bonds = ring_bonds
        self.ring_sizes: list[set[int]] = [set() for _ in mol.atoms]
        self.ring_count = [0] * len(mol.atoms)
        for ring in mol.rings:
            for a in ring:
                self.ring_sizes[a].add(len(ring))
                self.ring_count[a] += 1
        self.total_h = [mol.implicit_hydrogens(i) for i in range(len(mol.atoms))]
        self.degree = [mol.degree(i) for i in range(len(mol.atoms))]
        self.valence = [mol.bond_order_sum(i) + self.total_h[i]
                        for i in range(len(mol.atoms))]


_CONTEXT_CACHE: dict[int, MatchContext] = {}


def _context(mol: Molecule) -> MatchContext:
    ctx = _CONTEXT_CACHE.get(id(mol))
    if ctx is None or ctx.mol is not mol:
        ctx = MatchContext(mol)
        _CONTEXT_CACHE.clear()
        _CONTEXT_CACHE[id(mol)] = ctx
    return ctx


# -- atom/bond expression AST ---------------------------------------------

@dataclass
class _Prim:
    name: str
    arg: object = None

    def eval(self, ctx: MatchContext, i: int) -> bool:
        atom = ctx.mol.atoms[i]
        n = self.name
        if n == "any":
            return True
        if n == "elem":
            return ATOMIC_NUMBER[atom.element] == self.arg
        if n == "arom":
            return atom.aromatic
        if n == "aliph":
            return not atom.aromatic
        if n == "charge":
            return atom.formal_charge == self.arg
        if n == "degree":
            return ctx.degree[i] == self.arg
        if n == "hcount":
            return ctx.total_h[i] == self.arg
        if n == "conn":
            return ctx.degree[i] + ctx.total_h[i] == self.arg
        if n == "valence":
            return ctx.valence[i] == self.arg
        if n == "in_ring":
            return ctx.in_ring[i]
        if n == "ring_count":
            return ctx.ring_count[i] == self.arg
        if n == "ring_size":
            return self.arg in ctx.ring_sizes[i]
        if n == "recursive":
            return _matches_rooted(self.arg, ctx, i)
        raise AssertionError(n)


@dataclass
class _Not:
    inner: object

    def eval(self, ctx, i):
        return not self.inner.eval(ctx, i)


@dataclass
class _And:
    parts: list

    def eval(self, ctx, i):
        return all(p.eval(ctx, i) for p in self.parts)


@dataclass
class _Or:
    parts: list

    def eval(self, ctx, i):
        return any(p.eval(ctx, i) for p in self.parts)


@dataclass
class _BondPrim:
    name: str  # single/double/triple/aromatic/any/ring

    def eval(self, ctx: MatchContext, bond_index: int) -> bool:
        bond = ctx.mol.bonds[bond_index]
        n = self.name
        if n == "any":
            return True
        if n == "single":
            return bond.order == BOND_SINGLE and not bond.aromatic
        if n == "double":
            return bond.order == BOND_DOUBLE and not bond.aromatic
        if n == "triple":
            return bond.order == BOND_TRIPLE
        if n == "aromatic":
            return bond.aromatic
        if n == "ring":
            return ctx.ring_bonds[bond_index]
        raise AssertionError(n)


_DEFAULT_BOND = _Or([_BondPrim("single"), _BondPrim("aromatic")])


@dataclass
class PatternAtom:
    expr: object


@dataclass
class PatternBond:
    a: int
    b: int
    expr: object


@dataclass
class SmartsPattern:
    source: str
    atoms: list[PatternAtom]
    bonds: list[PatternBond]

    def __post_init__(self):
        self._adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for k, pb in enumerate(self.bonds):
            self._adj[pb.a].append((pb.b, k))
            self._adj[pb.b].append((pb.a, k))


# -- parser ----------------------------------------------------------------

class _Scanner:
    def __init__(self, text: str, depth: int):
        self.text = text
        self.pos = 0
        self.depth = depth

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def number(self, default=None):
        digits = ""
        while self.peek().isdigit():
            digits += self.take()
        return int(digits) if digits else default

    def error(self, msg):
        raise SmartsError(msg, self.pos)


def _parse_bracket_expr(sc: _Scanner) -> object:
    # ';' lowest, then ',', then '&'/adjacency, '!' binds to one primitive.
    def parse_unit():
        neg = False
        while sc.peek() == "!":
            sc.take()
            neg = not neg
        prim = parse_prim()
        return _Not(prim) if neg else prim

    def parse_prim():
        ch = sc.peek()
        if ch == "$":
            sc.take()
            if sc.take() != "(":
                sc.error("expected '(' after '$'")
            if sc.depth >= 1:
                sc.error("recursive SMARTS nested deeper than 1")
            depth = 1
            start = sc.pos
            while sc.pos < len(sc.text):
                c = sc.take()
                if c == "(":
                    depth += 1
                elif c == ")":
                    depth -= 1
                    if depth == 0:
                        break
            else:
                sc.error("unterminated recursive SMARTS")
            inner = _parse_pattern(sc.text[start:sc.pos - 1], sc.depth + 1)
            return _Prim("recursive", inner)
        if ch == "#":
            sc.take()
            num = sc.number()
            if num is None:
                sc.error("expected atomic number after '#'")
            return _Prim("elem", num)
        if ch == "*":
            sc.take()
            return _Prim("any")
        if ch == "a":
            two = sc.text[sc.pos:sc.pos + 2]
            if two == "as":
                sc.pos += 2
                return _And([_Prim("elem", ATOMIC_NUMBER["As"]), _Prim("arom")])
            sc.take()
            return _Prim("arom")
        if ch == "A":
            two = sc.text[sc.pos:sc.pos + 2]
            if two in _TWO_LETTER:
                sc.pos += 2
                return _And([_Prim("elem", ATOMIC_NUMBER[two]), _Prim("aliph")])
            sc.take()
            return _Prim("aliph")
        two = sc.text[sc.pos:sc.pos + 2]
        if two in _TWO_LETTER:
            sc.pos += 2
            return _And([_Prim("elem", ATOMIC_NUMBER[two]), _Prim("aliph")])
        if two == "se":
            sc.pos += 2
            return _And([_Prim("elem", ATOMIC_NUMBER["Se"]), _Prim("arom")])
        if ch == "D":
            sc.take()
            return _Prim("degree", sc.number(1))
        if ch in ("H", "h"):
            sc.take()
            return _Prim("hcount", sc.number(1))
        if ch == "X":
            sc.take()
            return _Prim("conn", sc.number(1))
        if ch == "v":
            sc.take()
            return _Prim("valence", sc.number(1))
        if ch == "R":
            sc.take()
            num = sc.number(None)
            if num is None:
                return _Prim("in_ring")
            if num == 0:
                return _Not(_Prim("in_ring"))
            return _Prim("ring_count", num)
        if ch == "r":
            sc.take()
            num = sc.number(None)
            if num is None:
                return _Prim("in_ring")
            return _Prim("ring_size", num)
        if ch == "+":
            sc.take()
            num = sc.number(None)
            if num is None:
                num = 1
                while sc.peek() == "+":
                    sc.take()
                    num += 1
            return _Prim("charge", num)
        if ch == "-":
            sc.take()
            num = sc.number(None)
            if num is None:
                num = 1
                while sc.peek() == "-":
                    sc.take()
                    num += 1
            return _Prim("charge", -num)
        if ch.isupper() and ch in ATOMIC_NUMBER:
            sc.take()
            return _And([_Prim("elem", ATOMIC_NUMBER[ch]), _Prim("aliph")])
        if ch in _AROMATIC_LOWER:
            sc.take()
            return _And([_Prim("elem", ATOMIC_NUMBER[_AROMATIC_LOWER[ch]]),
                         _Prim("arom")])
        sc.error(f"unsupported SMARTS primitive {ch!r}")

    def parse_and():
        parts = [parse_unit()]
        while True:
            ch = sc.peek()
            if ch == "&":
                sc.take()
                parts.append(parse_unit())
            elif ch and ch not in ",;]":
                parts.append(parse_unit())
            else:
                break
        return parts[0] if len(parts) == 1 else _And(parts)

    def parse_or():
        parts = [parse_and()]
        while sc.peek() == ",":
            sc.take()
            parts.append(parse_and())
        return parts[0] if len(parts) == 1 else _Or(parts)

    parts = [parse_or()]
    while sc.peek() == ";":
        sc.take()
        parts.append(parse_or())
    return parts[0] if len(parts) == 1 else _And(parts)


def _parse_bond_expr(sc: _Scanner):
    prim_map = {"-": _BondPrim("single"), "=": _BondPrim("double"),
                "#": _BondPrim("triple"), ":": _BondPrim("aromatic"),
                "~": _BondPrim("any"), "@": _BondPrim("ring")}

    def unit():
        neg = False
        while sc.peek() == "!":
            sc.take()
            neg = not neg
        ch = sc.peek()
        if ch not in prim_map:
            sc.error(f"unsupported bond primitive {ch!r}")
        sc.take()
        p = prim_map[ch]
        return _Not(p) if neg else p

    def parse_and():
        parts = [unit()]
        while True:
            ch = sc.peek()
            if ch == "&":
                sc.take()
                parts.append(unit())
            elif ch in prim_map or ch == "!":
                parts.append(unit())
            else:
                break
        return parts[0] if len(parts) == 1 else _And(parts)

    parts = [parse_and()]
    while sc.peek() == ",":
        sc.take()
        parts.append(parse_and())
    expr = parts[0] if len(parts) == 1 else _Or(parts)
    while sc.peek() == ";":
        sc.take()
        expr = _And([expr, _parse_bond_expr(sc)])
    return expr


def _parse_pattern(text: str, depth: int = 0) -> SmartsPattern:
    sc = _Scanner(text, depth)
    atoms: list[PatternAtom] = []
    bonds: list[PatternBond] = []
    prev: int | None = None
    pending = None
    stack: list[int] = []
    ring_open: dict[int, tuple[int, object]] = {}

    def add_atom(expr):
        nonlocal prev, pending
        atoms.append(PatternAtom(expr))
        idx = len(atoms) - 1
        if prev is not None:
            bonds.append(PatternBond(prev, idx, pending or _DEFAULT_BOND))
        prev = idx
        pending = None

    while sc.pos < len(sc.text):
        ch = sc.peek()
        if ch == "[":
            sc.take()
            expr = _parse_bracket_expr(sc)
            if sc.take() != "]":
                sc.error("expected ']'")
            add_atom(expr)
        elif ch in "-=#:~@!":
            pending = _parse_bond_expr(sc)
        elif ch == "(":
            sc.take()
            if prev is None:
                sc.error("branch before any atom")
            stack.append(prev)
        elif ch == ")":
            sc.take()
            if not stack:
                sc.error("unmatched ')'")
            prev = stack.pop()
        elif ch.isdigit() or ch == "%":
            if ch == "%":
                sc.take()
                num = int(sc.take() + sc.take())
            else:
                num = int(sc.take())
            if prev is None:
                sc.error("ring closure before any atom")
            if num in ring_open:
                first, fbond = ring_open.pop(num)
                expr = pending or fbond or _DEFAULT_BOND
                bonds.append(PatternBond(first, prev, expr))
            else:
                ring_open[num] = (prev, pending)
            pending = None
        elif ch == "*":
            sc.take()
            add_atom(_Prim("any"))
        elif ch == "a":
            sc.take()
            add_atom(_Prim("arom"))
        elif ch == "A":
            sc.take()
            add_atom(_Prim("aliph"))
        else:
            two = sc.text[sc.pos:sc.pos + 2]
            if two in ("Cl", "Br"):
                sc.pos += 2
                add_atom(_And([_Prim("elem", ATOMIC_NUMBER[two]), _Prim("aliph")]))
            elif ch.isupper() and ch in ATOMIC_NUMBER:
                sc.take()
                add_atom(_And([_Prim("elem", ATOMIC_NUMBER[ch]), _Prim("aliph")]))
            elif ch in "bcnops":
                sc.take()
                add_atom(_And([_Prim("elem", ATOMIC_NUMBER[_AROMATIC_LOWER[ch]]),
                               _Prim("arom")]))
            else:
                sc.error(f"unsupported SMARTS syntax {ch!r}")
    if stack:
        sc.error("unclosed branch")
    if ring_open:
        sc.error("dangling ring closure")
    if not atoms:
        sc.error("empty pattern")
    return SmartsPattern(text, atoms, bonds)


def parse_smarts(pattern: str) -> SmartsPattern:
    """Compile a SMARTS-subset pattern; SmartsError on anything unsupported."""
    return _parse_pattern(pattern, 0)


# -- matching --------------------------------------------------------------

def _match_order(p: SmartsPattern) -> list[tuple[int, list[tuple[int, int]]]]:
    """Connected visit order: (pattern atom, [(mapped nbr, bond idx), ...])."""
    n = len(p.atoms)
    placed = [False] * n
    order = []
    for start in range(n):
        if placed[start]:
            continue
        placed[start] = True
        order.append((start, []))
        queue = [start]
        while queue:
            frontier = None
            for a, adj in enumerate(p._adj):
                if placed[a]:
                    continue
                anchors = [(b, k) for b, k in adj if placed[b]]
                if anchors:
                    frontier = (a, anchors)
                    break
            if frontier is None:
                break
            placed[frontier[0]] = True
            order.append(frontier)
            queue = [frontier[0]]
    return order


def _search(p: SmartsPattern, ctx: MatchContext, root: int | None,
            limit: int | None, uniquify: bool) -> list[tuple[int, ...]]:
    mol = ctx.mol
    order = _match_order(p)
    n_pat = len(p.atoms)
    mapping = [-1] * n_pat
    used = [False] * len(mol.atoms)
    out: list[tuple[int, ...]] = []
    seen_sets: set[frozenset] = set()

    bond_of: dict[tuple[int, int], int] = {}
    for bi, bond in enumerate(mol.bonds):
        bond_of[(bond.a, bond.b)] = bi
        bond_of[(bond.b, bond.a)] = bi

    def candidates(step: int):
        pa, anchors = order[step]
        if not anchors:
            if step == 0 and root is not None:
                return [root] if not used[root] else []
            return range(len(mol.atoms))
        anchor, _ = anchors[0]
        return mol.neighbors(mapping[anchor])

    def feasible(pa: int, anchors, tgt: int) -> bool:
        if used[tgt] or not p.atoms[pa].expr.eval(ctx, tgt):
            return False
        for nb, bk in anchors:
            bi = bond_of.get((mapping[nb], tgt))
            if bi is None or not p.bonds[bk].expr.eval(ctx, bi):
                return False
        return True

    def extend(step: int) -> bool:
        if step == len(order):
            match = tuple(mapping)
            if uniquify:
                key = frozenset(match)
                if key in seen_sets:
                    return False
                seen_sets.add(key)
            out.append(match)
            return limit is not None and len(out) >= limit
        pa, anchors = order[step]
        for tgt in candidates(step):
            if feasible(pa, anchors, tgt):
                mapping[pa] = tgt
                used[tgt] = True
                done = extend(step + 1)
                used[tgt] = False
                mapping[pa] = -1
                if done:
                    return True
        return False

    extend(0)
    return out


def _matches_rooted(p: SmartsPattern, ctx: MatchContext, atom: int) -> bool:
    return bool(_search(p, ctx, root=atom, limit=1, uniquify=False))


def find_matches(p: SmartsPattern, mol: Molecule) -> list[tuple[int, ...]]:
    """All embeddings of the pattern, deduplicated by matched atom set."""
    if not mol.atoms:
        return []
    return _search(p, _context(mol), root=None, limit=None, uniquify=True)


def matches_at(p: SmartsPattern, mol: Molecule, atom: int) -> bool:
    """Does an embedding exist mapping the pattern's first atom onto `atom`?"""
    return _matches_rooted(p, _context(mol), atom)


def has_match(p: SmartsPattern, mol: Molecule) -> bool:
    if not mol.atoms:
        return False
    return bool(_search(p, _context(mol), root=None, limit=1, uniquify=False))


def count_matches(p: SmartsPattern, mol: Molecule) -> int:
    return len(find_matches(p, mol))


# -- static prescreen helpers ----------------------------------------------

def atom_element_candidates(expr) -> frozenset | None:
    """Atomic numbers this atom expression can possibly accept, or None
    when the expression does not pin the element.  Conservative: a non-None
    result is exact for positive element tests; negations and recursion
    yield None."""
    if isinstance(expr, _Prim):
        return frozenset([expr.arg]) if expr.name == "elem" else None
    if isinstance(expr, _And):
        out = None
        for p in expr.parts:
            s = atom_element_candidates(p)
            if s is not None:
                out = s if out is None else out & s
        return out
    if isinstance(expr, _Or):
        sets = [atom_element_candidates(p) for p in expr.parts]
        if any(s is None for s in sets):
            return None
        return frozenset().union(*sets)
    return None


def atom_aromatic_requirement(expr) -> bool | None:
    """True/False when the expression forces (non-)aromaticity, else None."""
    if isinstance(expr, _Prim):
        if expr.name == "arom":
            return True
        if expr.name == "aliph":
            return False
        return None
    if isinstance(expr, _And):
        for p in expr.parts:
            r = atom_aromatic_requirement(p)
            if r is not None:
                return r
        return None
    if isinstance(expr, _Or):
        reqs = [atom_aromatic_requirement(p) for p in expr.parts]
        if all(r is True for r in reqs):
            return True
        if all(r is False for r in reqs):
            return False
        return None
    return None


def element_prescreen(p: SmartsPattern) -> list[frozenset]:
    """Per-atom candidate element sets (unconstrained atoms omitted); a
    molecule lacking every element of any listed set cannot match."""
    out = []
    for a in p.atoms:
        s = atom_element_candidates(a.expr)
        if s is not None:
            out.append(s)
    return out


# -- whole-graph isomorphism ----------------------------------------------

def isomorphic(a: Molecule, b: Molecule) -> bool:
    """Constitution-level graph isomorphism (element, charge, H count,
    aromaticity; bond order with aromatic bonds interchangeable)."""
    if len(a.atoms) != len(b.atoms) or len(a.bonds) != len(b.bonds):
        return False

    def akey(mol, i):
        at = mol.atoms[i]
        return (at.element, at.formal_charge, mol.implicit_hydrogens(i),
                at.aromatic, mol.degree(i))

    from collections import Counter
    if Counter(akey(a, i) for i in range(len(a.atoms))) != \
            Counter(akey(b, i) for i in range(len(b.atoms))):
        return False

    def bkey(bond):
        return "ar" if bond.aromatic else bond.order

    bond_of = {}
    for bond in b.bonds:
        bond_of[(bond.a, bond.b)] = bond
        bond_of[(bond.b, bond.a)] = bond

    n = len(a.atoms)
    mapping = [-1] * n
    used = [False] * n

    # visit order keeping connectivity where possible
    order = []
    placed = [False] * n
    for start in range(n):
        if placed[start]:
            continue
        stack = [start]
        placed[start] = True
        while stack:
            v = stack.pop()
            order.append(v)
            for w in a.neighbors(v):
                if not placed[w]:
                    placed[w] = True
                    stack.append(w)

    def extend(k: int) -> bool:
        if k == n:
            return True
        v = order[k]
        for t in range(n):
            if used[t] or akey(a, v) != akey(b, t):
                continue
            ok = True
            for bi in a.adjacency[v]:
                bond = a.bonds[bi]
                w = bond.other(v)
                if mapping[w] >= 0:
                    other = bond_of.get((t, mapping[w]))
                    if other is None or bkey(other) != bkey(bond):
                        ok = False
                        break
            if ok:
                mapping[v] = t
                used[t] = True
                if extend(k + 1):
                    return True
                used[t] = False
                mapping[v] = -1
        return False

    return extend(0)
