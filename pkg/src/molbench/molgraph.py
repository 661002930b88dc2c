"""Molecular graph model: valence accounting, rings, aromaticity, kekulization.

A `Molecule` starts mutable while a parser assembles it, then goes through
`sanitize()`, which perceives rings, resolves aromatic bond orders (kekulizes),
assigns implicit hydrogens and checks valences.  After sanitization the object
is frozen and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import periodic
from .errors import KekulizationError, ValenceError

BOND_SINGLE = 1
BOND_DOUBLE = 2
BOND_TRIPLE = 3


@dataclass
class Atom:
    element: str
    formal_charge: int = 0
    explicit_h: int | None = None  # bracket H count; None = organic-subset rule
    isotope: int | None = None
    aromatic: bool = False
    stereo: str | None = None  # "@" or "@@", stored but identity-neutral

    def __post_init__(self):
        if self.element not in periodic.SUPPORTED_ELEMENTS:
            raise ValueError(f"unsupported element {self.element!r}")
        if abs(self.formal_charge) > periodic.MAX_FORMAL_CHARGE:
            raise ValueError(f"formal charge {self.formal_charge} out of range")


@dataclass
class Bond:
    a: int
    b: int
    order: int = BOND_SINGLE
    aromatic: bool = False
    stereo: str | None = None  # "/" or "\\", stored but identity-neutral

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


class Molecule:
    """Attributed graph of atoms and bonds."""

    def __init__(self):
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.sanitized = False
        self._adjacency: list[list[int]] | None = None
        self._rings: list[tuple[int, ...]] | None = None
        self._implicit_h: list[int] | None = None

    # -- construction ------------------------------------------------------

    def add_atom(self, atom: Atom) -> int:
        self._check_mutable()
        self.atoms.append(atom)
        return len(self.atoms) - 1

    def add_bond(self, a: int, b: int, order: int = BOND_SINGLE,
                 aromatic: bool = False, stereo: str | None = None) -> int:
        self._check_mutable()
        if a == b:
            raise ValueError("self-loop bond")
        n = len(self.atoms)
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError("bond endpoint out of range")
        if any(b2.key == (min(a, b), max(a, b)) for b2 in self.bonds):
            raise ValueError(f"duplicate bond {a}-{b}")
        self.bonds.append(Bond(a, b, order, aromatic, stereo))
        self._adjacency = None
        return len(self.bonds) - 1

    def _check_mutable(self):
        if self.sanitized:
            raise RuntimeError("molecule is frozen after sanitization")

    # -- topology ----------------------------------------------------------

    @property
    def adjacency(self) -> list[list[int]]:
        """Per-atom list of incident bond indices."""
        if self._adjacency is None:
            adj: list[list[int]] = [[] for _ in self.atoms]
            for i, bond in enumerate(self.bonds):
                adj[bond.a].append(i)
                adj[bond.b].append(i)
            self._adjacency = adj
        return self._adjacency

    def neighbors(self, idx: int) -> list[int]:
        return [self.bonds[bi].other(idx) for bi in self.adjacency[idx]]

    def degree(self, idx: int) -> int:
        return len(self.adjacency[idx])

    def bond_between(self, a: int, b: int) -> Bond | None:
        for bi in self.adjacency[a]:
            if self.bonds[bi].other(a) == b:
                return self.bonds[bi]
        return None

    def components(self) -> list[list[int]]:
        seen = [False] * len(self.atoms)
        out = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            comp, stack = [], [start]
            seen[start] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v):
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(comp)
        return out

    # -- derived chemistry -------------------------------------------------

    def bond_order_sum(self, idx: int) -> int:
        return sum(self.bonds[bi].order for bi in self.adjacency[idx])

    def implicit_hydrogens(self, idx: int) -> int:
        if self._implicit_h is not None:
            return self._implicit_h[idx]
        return _implicit_h_for(self, idx)

    def total_valence(self, idx: int) -> int:
        return self.bond_order_sum(idx) + self.implicit_hydrogens(idx)

    @property
    def rings(self) -> list[tuple[int, ...]]:
        if self._rings is None:
            self._rings = perceive_rings(self)
        return self._rings

    def ring_membership(self) -> tuple[list[bool], list[bool]]:
        """(atom_in_ring, bond_in_ring) flags derived from the SSSR."""
        atom_flag = [False] * len(self.atoms)
        bond_flag = [False] * len(self.bonds)
        pair_to_bond = {b.key: i for i, b in enumerate(self.bonds)}
        for ring in self.rings:
            for k, a in enumerate(ring):
                atom_flag[a] = True
                b = ring[(k + 1) % len(ring)]
                bond_flag[pair_to_bond[(min(a, b), max(a, b))]] = True
        return atom_flag, bond_flag

    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.element != "H")

    def copy_unsanitized(self) -> "Molecule":
        m = Molecule()
        for a in self.atoms:
            m.atoms.append(Atom(a.element, a.formal_charge, a.explicit_h,
                                a.isotope, a.aromatic, a.stereo))
        for b in self.bonds:
            m.bonds.append(Bond(b.a, b.b, b.order, b.aromatic, b.stereo))
        return m

    def __len__(self) -> int:
        return len(self.atoms)


# -- implicit hydrogens ----------------------------------------------------

def _implicit_h_for(mol: Molecule, idx: int) -> int:
    atom = mol.atoms[idx]
    if atom.explicit_h is not None:
        return atom.explicit_h
    order_sum = mol.bond_order_sum(idx)
    for v in periodic.allowed_valences(atom.element, atom.formal_charge):
        if v >= order_sum:
            return v - order_sum
    return 0


def implicit_hydrogen_count(atom_index: int, mol: Molecule) -> int:
    """Bracket-specified H count if present, else the organic-subset rule."""
    return _implicit_h_for(mol, atom_index)


# -- valence validation ----------------------------------------------------

def validate_valences(mol: Molecule) -> list[tuple[int, str, int, int]]:
    """Check every atom's total valence against its allowed table.

    Returns a list of violations (atom index, element, charge, valence);
    empty means the molecule is chemically sound.  Never raises.
    """
    violations = []
    for i, atom in enumerate(mol.atoms):
        valence = mol.bond_order_sum(i) + _implicit_h_for(mol, i)
        if valence not in periodic.allowed_valences(atom.element, atom.formal_charge):
            violations.append((i, atom.element, atom.formal_charge, valence))
    return violations


# -- ring perception (SSSR) ------------------------------------------------

def perceive_rings(mol: Molecule) -> list[tuple[int, ...]]:
    """Smallest set of smallest rings: E - V + C minimal independent cycles.

    Horton candidate generation (shortest cycle through each vertex/edge
    pair) followed by greedy GF(2) independence selection, smallest first.
    """
    n = len(mol.atoms)
    n_edges = len(mol.bonds)
    n_comp = len(mol.components())
    rank = n_edges - n + n_comp
    if rank <= 0:
        return []

    adj = [[] for _ in range(n)]
    for bi, bond in enumerate(mol.bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))

    # BFS trees from every vertex: parent pointers + distances.
    candidates: dict[int, tuple[int, ...]] = {}  # edge bitmask -> atom cycle
    for root in range(n):
        dist = [-1] * n
        parent = [(-1, -1)] * n  # (parent atom, bond index)
        dist[root] = 0
        queue = [root]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for w, bi in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    parent[w] = (v, bi)
                    queue.append(w)

        def path_to_root(v):
            atoms, edges = [v], []
            while v != root:
                p, bi = parent[v]
                edges.append(bi)
                atoms.append(p)
                v = p
            return atoms, edges

        for bi, bond in enumerate(mol.bonds):
            x, y = bond.a, bond.b
            if dist[x] < 0 or dist[y] < 0:
                continue
            ax, ex = path_to_root(x)
            ay, ey = path_to_root(y)
            # Paths must be vertex-disjoint apart from the root.
            if set(ax[:-1]) & set(ay[:-1]):
                continue
            edge_set = set(ex) | set(ey) | {bi}
            if len(edge_set) != len(ex) + len(ey) + 1:
                continue
            mask = 0
            for e in edge_set:
                mask |= 1 << e
            if mask in candidates:
                continue
            cycle = ax[:-1] + [root] + ay[-2::-1]
            if len(cycle) != len(edge_set):
                continue
            candidates[mask] = tuple(cycle)

    ordered = sorted(candidates.items(), key=lambda kv: (len(kv[1]), kv[1]))
    basis: list[int] = []  # row-echelon masks
    chosen: list[tuple[int, ...]] = []
    for mask, cycle in ordered:
        residue = mask
        for row in basis:
            low = row & -row
            if residue & low:
                residue ^= row
        if residue:
            basis.append(residue)
            basis.sort(key=lambda m: m & -m)
            chosen.append(cycle)
            if len(chosen) == rank:
                break
    return chosen


# -- aromaticity -----------------------------------------------------------

_LONE_PAIR_DONORS = {"N", "O", "S", "P", "Se", "As"}


def _pi_contribution(mol: Molecule, idx: int, system: set[int],
                     ring_atoms: list[bool]) -> int | None:
    """Hueckel pi electrons an atom donates to the candidate system.

    None means the atom cannot take part in an aromatic ring at all.
    """
    atom = mol.atoms[idx]
    double_partners = [mol.bonds[bi].other(idx)
                       for bi in mol.adjacency[idx]
                       if mol.bonds[bi].order == BOND_DOUBLE]
    triple = any(mol.bonds[bi].order == BOND_TRIPLE for bi in mol.adjacency[idx])
    if triple or len(double_partners) > 1:
        return None
    heavy_conn = mol.degree(idx)
    total_conn = heavy_conn + mol.implicit_hydrogens(idx)
    if total_conn > 3:
        return None

    if double_partners:
        partner = double_partners[0]
        if partner in system or ring_atoms[partner]:
            return 1
        # Exocyclic double bond to a chain atom: sp2 but no pi for the ring.
        return 0

    el, q = atom.element, atom.formal_charge
    if el == "C":
        if q == -1:
            return 2
        if q == 1:
            return 0
        return None  # saturated carbon
    if el == "B" and q == 0:
        return 0
    if el in _LONE_PAIR_DONORS:
        if q > 0:
            return None  # positively charged heteroatom with no double bond
        return 2
    return None


def perceive_aromaticity(mol: Molecule) -> tuple[list[bool], list[bool]]:
    """Mark aromatic atoms/bonds by Hueckel 4n+2 over SSSR rings.

    Runs on a kekulized molecule (all bond orders integral).  Rings are
    tested individually first, then edge-fused pairs (azulene-style systems).
    Returns (atom_flags, bond_flags).
    """
    atom_flag = [False] * len(mol.atoms)
    bond_flag = [False] * len(mol.bonds)
    rings = mol.rings
    if not rings:
        return atom_flag, bond_flag
    ring_atoms, _ = mol.ring_membership()
    pair_to_bond = {b.key: i for i, b in enumerate(mol.bonds)}

    def ring_bond_indices(atoms_seq):
        out = []
        for k, a in enumerate(atoms_seq):
            b = atoms_seq[(k + 1) % len(atoms_seq)]
            out.append(pair_to_bond[(min(a, b), max(a, b))])
        return out

    def try_system(atom_set: set[int], bond_idxs: list[int]) -> bool:
        total = 0
        for a in atom_set:
            contrib = _pi_contribution(mol, a, atom_set, ring_atoms)
            if contrib is None:
                return False
            total += contrib
        if total % 4 != 2:
            return False
        for a in atom_set:
            atom_flag[a] = True
        for bi in bond_idxs:
            bond_flag[bi] = True
        return True

    failed = []
    for ring in rings:
        if not try_system(set(ring), ring_bond_indices(ring)):
            failed.append(ring)

    # Second pass: unions of two edge-fused rings that failed individually.
    for i in range(len(failed)):
        for j in range(i + 1, len(failed)):
            shared = set(failed[i]) & set(failed[j])
            if len(shared) < 2:
                continue
            union = set(failed[i]) | set(failed[j])
            bonds = []
            for a in union:
                for bi in mol.adjacency[a]:
                    other = mol.bonds[bi].other(a)
                    if other in union and bi not in bonds:
                        # perimeter + shared bonds of the fused pair
                        ring_i = a in failed[i] and other in failed[i]
                        ring_j = a in failed[j] and other in failed[j]
                        if ring_i or ring_j:
                            bonds.append(bi)
            try_system(union, bonds)

    return atom_flag, bond_flag


# -- kekulization ----------------------------------------------------------

def _needs_double_bond(mol: Molecule, idx: int) -> bool:
    """Does this input-aromatic atom require one double bond when kekulized?"""
    atom = mol.atoms[idx]
    # A written exocyclic double bond (e.g. aromatic carbonyl) already
    # satisfies the sp2 slot.
    if any(mol.bonds[bi].order == BOND_DOUBLE for bi in mol.adjacency[idx]):
        return False
    el, q = atom.element, atom.formal_charge
    conn = mol.degree(idx) + (atom.explicit_h or 0)
    if el in ("C", "B"):
        if q != 0:
            return False
        if el == "B":
            return conn < 3
        return True
    if el in ("N", "P", "As"):
        if q > 0:
            return True  # pyridinium-type
        if q < 0:
            return False
        return conn < 3  # 2-connected bare n = pyridine-type
    if el in ("O", "S", "Se"):
        return q > 0  # pyrylium-type
    return False


def kekulize(mol: Molecule) -> None:
    """Resolve input-aromatic bonds to alternating single/double orders.

    Mutates bond orders in place; raises KekulizationError when no perfect
    matching over the double-bond-demanding aromatic atoms exists.
    """
    arom_atoms = [i for i, a in enumerate(mol.atoms) if a.aromatic]
    if not arom_atoms:
        return
    ring_atoms, ring_bonds = mol.ring_membership()
    for i in arom_atoms:
        if not ring_atoms[i]:
            raise KekulizationError(f"aromatic atom {i} is not in a ring")

    need = {i for i in arom_atoms if _needs_double_bond(mol, i)}
    # Candidate edges: aromatic-flagged ring bonds joining two demanding
    # atoms (an exocyclic aromatic-default bond, e.g. biphenyl's pivot, is
    # always single).
    nbrs: dict[int, list[tuple[int, int]]] = {i: [] for i in need}
    for bi, bond in enumerate(mol.bonds):
        if bond.aromatic and ring_bonds[bi] and bond.a in need and bond.b in need:
            nbrs[bond.a].append((bond.b, bi))
            nbrs[bond.b].append((bond.a, bi))

    matched: dict[int, int] = {}  # atom -> partner
    chosen_bonds: set[int] = set()

    order = sorted(need, key=lambda i: len(nbrs[i]))

    def backtrack(pos: int) -> bool:
        while pos < len(order) and order[pos] in matched:
            pos += 1
        if pos == len(order):
            return True
        v = order[pos]
        for w, bi in nbrs[v]:
            if w not in matched:
                matched[v] = w
                matched[w] = v
                chosen_bonds.add(bi)
                if backtrack(pos + 1):
                    return True
                del matched[v], matched[w]
                chosen_bonds.discard(bi)
        return False

    if not backtrack(0):
        raise KekulizationError(
            "no alternating single/double assignment for aromatic system")

    for bi, bond in enumerate(mol.bonds):
        if bond.aromatic:
            bond.order = BOND_DOUBLE if bi in chosen_bonds else BOND_SINGLE


# -- sanitization pipeline -------------------------------------------------

def sanitize(mol: Molecule) -> Molecule:
    """Rings, kekulization, aromaticity, implicit H and valence check.

    Raises KekulizationError or ValenceError on chemically broken input;
    on success freezes and returns the molecule.
    """
    if mol.sanitized:
        return mol
    mol.adjacency  # force build, also validates structure
    mol.rings

    input_aromatic = [a.aromatic for a in mol.atoms]
    kekulize(mol)
    atom_flag, bond_flag = perceive_aromaticity(mol)

    # Lowercase input the perception does not confirm is chemically bogus
    # (e.g. written-aromatic cyclobutadiene).
    for i, was in enumerate(input_aromatic):
        if was and not atom_flag[i]:
            raise KekulizationError(
                f"atom {i} written aromatic but fails Hueckel perception")

    for i, atom in enumerate(mol.atoms):
        atom.aromatic = atom_flag[i]
    for bi, bond in enumerate(mol.bonds):
        bond.aromatic = bond_flag[bi]

    mol._implicit_h = [_implicit_h_for(mol, i) for i in range(len(mol.atoms))]

    violations = validate_valences(mol)
    if violations:
        raise ValenceError(violations)

    mol.sanitized = True
    return mol
