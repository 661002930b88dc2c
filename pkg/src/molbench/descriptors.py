"""Chemical property calculators and percentage normalizations.

Covers partition coefficient (atom-contribution method), topological polar
surface area, feature counts, synthetic-accessibility score, natural-product
likeness and the weighted drug-likeness score, plus the affine maps that
turn raw values into the 0-100 scales used in reports.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from importlib import resources

from .errors import MissingTable
from .fingerprints import morgan_environments
from .molgraph import BOND_DOUBLE, BOND_SINGLE, BOND_TRIPLE, Molecule
from .periodic import ATOMIC_NUMBER, ATOMIC_WEIGHT
from .smarts import (SmartsPattern, atom_aromatic_requirement,
                     atom_element_candidates, element_prescreen, has_match,
                     matches_at, parse_smarts)


@dataclass(frozen=True)
class RawDescriptors:
    logp: float
    tpsa: float
    mw: float
    hbd: int
    hba: int
    rot_bonds: int
    aromatic_rings: int
    alerts: int
    sa_raw: float
    qed_raw: float
    np_raw: float


@dataclass(frozen=True)
class NormalizationSpec:
    """Affine (a, b) pairs mapping raw values to clipped 0-100 scales."""

    np_range: tuple[float, float] = (-3.0, 1.0)
    sol_range: tuple[float, float] = (-2.12178879609, 6.0429063424)
    sas_range: tuple[float, float] = (5.0, 1.5)  # inverted: low raw = high pct
    qed_range: tuple[float, float] = (0.0, 1.0)

    def as_dict(self) -> dict:
        return {"np": self.np_range, "sol": self.sol_range,
                "sas": self.sas_range, "qed": self.qed_range}


def _pct(raw: float, span: tuple[float, float]) -> float:
    a, b = span
    return 100.0 * min(max((raw - a) / (b - a), 0.0), 1.0)


def normalize(raw: RawDescriptors,
              spec: NormalizationSpec = NormalizationSpec()) -> tuple[float, float, float, float]:
    """(np_pct, sol_pct, sas_pct, qed_pct) for one molecule."""
    return (_pct(raw.np_raw, spec.np_range),
            _pct(raw.logp, spec.sol_range),
            _pct(raw.sa_raw, spec.sas_range),
            _pct(raw.qed_raw, spec.qed_range))


# -- parameter tables ------------------------------------------------------

_QED_FIELDS = ("a", "b", "c", "d", "e", "f", "dmax", "weight")


def _data_text(name: str) -> str:
    return resources.files("molbench.data").joinpath(name).read_text()


def _strip_comment(line: str) -> str:
    # '#' opens a comment only at line start or after whitespace, so bond
    # symbols inside SMARTS survive.
    if line.startswith("#"):
        return ""
    for i, ch in enumerate(line):
        if ch == "#" and line[i - 1] in " \t":
            return line[:i]
    return line


class ParameterTables:
    """All descriptor parameterizations, loaded once and shared read-only."""

    def __init__(self,
                 crippen_rows: list[tuple[str, SmartsPattern | None, float]],
                 tpsa_values: dict[str, float],
                 qed_params: dict[str, dict[str, float]],
                 alert_patterns: list[tuple[str, SmartsPattern]],
                 feature_patterns: dict[str, SmartsPattern],
                 sa_fragment_scores: dict[int, float] | None,
                 np_fragment_scores: dict[int, float] | None,
                 content_hashes: dict[str, str]):
        self.crippen_rows = crippen_rows
        self.tpsa_values = tpsa_values
        self.qed_params = qed_params
        self.alert_patterns = alert_patterns
        self.feature_patterns = feature_patterns
        self.sa_fragment_scores = sa_fragment_scores
        self.np_fragment_scores = np_fragment_scores
        self.content_hashes = content_hashes
        self.hydrogen_values = {t: v for t, _, v in crippen_rows
                                if t in ("H1", "H2", "H3", "H4", "HS")}
        # static prescreens so typing and alert checks skip impossible rows
        self.crippen_roots = [
            (None, None) if p is None else
            (atom_element_candidates(p.atoms[0].expr),
             atom_aromatic_requirement(p.atoms[0].expr))
            for _, p, _ in crippen_rows]
        self.alert_prescreens = [element_prescreen(p)
                                 for _, p in alert_patterns]

    @classmethod
    def load_default(cls) -> "ParameterTables":
        hashes = {}

        def text_of(name):
            t = _data_text(name)
            hashes[name] = hashlib.sha256(t.encode()).hexdigest()[:16]
            return t

        crippen_rows = []
        for line in text_of("crippen_logp.tsv").splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            typ, smarts, value = line.split("\t")
            pattern = None if typ.startswith("H") and typ != "Hal" \
                else parse_smarts(smarts)
            crippen_rows.append((typ, pattern, float(value)))

        tpsa_values = {}
        for line in text_of("tpsa.tsv").splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            label, value = line.split("\t")
            tpsa_values[label] = float(value)

        qed_params = {}
        for line in text_of("qed_params.tsv").splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            parts = line.split("\t")
            qed_params[parts[0]] = dict(zip(_QED_FIELDS, map(float, parts[1:])))

        alerts = []
        for line in text_of("alerts.smarts").splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            alerts.append((line, parse_smarts(line)))

        features = {}
        for line in text_of("feature_patterns.tsv").splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            name, smarts = line.split("\t")
            features[name] = parse_smarts(smarts)

        sa_scores = cls._load_fragment_scores(text_of("sa_fragments.tsv"))
        np_scores = cls._load_fragment_scores(text_of("np_fragments.tsv"))
        return cls(crippen_rows, tpsa_values, qed_params, alerts, features,
                   sa_scores, np_scores, hashes)

    @staticmethod
    def _load_fragment_scores(text: str) -> dict[int, float]:
        out = {}
        for line in text.splitlines():
            line = _strip_comment(line).strip()
            if not line:
                continue
            h, score = line.split("\t")
            out[int(h)] = float(score)
        return out


_DEFAULT_TABLES: ParameterTables | None = None


def default_tables() -> ParameterTables:
    global _DEFAULT_TABLES
    if _DEFAULT_TABLES is None:
        _DEFAULT_TABLES = ParameterTables.load_default()
    return _DEFAULT_TABLES


# -- partition coefficient -------------------------------------------------

def _hydrogen_type(mol: Molecule, heavy: int) -> str:
    el = mol.atoms[heavy].element
    if el == "C":
        return "H1"
    if el == "N":
        return "H3"
    if el == "O":
        for nbr in mol.neighbors(heavy):
            nel = mol.atoms[nbr].element
            if nel == "N":
                return "H3"
            if nel in ("O", "S"):
                return "H4"
            if nel == "C":
                bond = mol.bond_between(heavy, nbr)
                if bond.order == BOND_SINGLE and not bond.aromatic:
                    # acid/enol H when that carbon is doubly bonded to a
                    # heteroatom or carbon
                    for bi in mol.adjacency[nbr]:
                        b2 = mol.bonds[bi]
                        if b2.order == BOND_DOUBLE and not b2.aromatic and \
                                mol.atoms[b2.other(nbr)].element in ("C", "N", "O", "S"):
                            return "H4"
        return "H2"
    return "H2"


def crippen_logp_detailed(mol: Molecule, tables: ParameterTables | None = None
                          ) -> tuple[float, list[str], int]:
    """(logp, per-heavy-atom types, catch-all fallback count)."""
    t = tables or default_tables()
    total = 0.0
    types = []
    untyped = 0
    for i in range(len(mol.atoms)):
        anum = ATOMIC_NUMBER[mol.atoms[i].element]
        aromatic = mol.atoms[i].aromatic
        assigned = None
        for (typ, pattern, value), (elems, arom) in \
                zip(t.crippen_rows, t.crippen_roots):
            if pattern is None:
                continue
            if elems is not None and anum not in elems:
                continue
            if arom is not None and arom != aromatic:
                continue
            if matches_at(pattern, mol, i):
                assigned = typ
                total += value
                break
        if assigned is None:
            untyped += 1
            assigned = "?"
        types.append(assigned)
        h = mol.implicit_hydrogens(i)
        if h:
            htype = _hydrogen_type(mol, i)
            total += h * t.hydrogen_values.get(htype, t.hydrogen_values["HS"])
    return total, types, untyped


def crippen_logp(mol: Molecule, tables: ParameterTables | None = None) -> float:
    return crippen_logp_detailed(mol, tables)[0]


# -- polar surface area ----------------------------------------------------

def _tpsa_label(mol: Molecule, i: int) -> str | None:
    atom = mol.atoms[i]
    if atom.element not in ("N", "O"):
        return None
    h = mol.implicit_hydrogens(i)
    q = atom.formal_charge
    n_s = n_d = n_t = n_a = 0
    for bi in mol.adjacency[i]:
        bond = mol.bonds[bi]
        if bond.aromatic:
            n_a += 1
        elif bond.order == BOND_SINGLE:
            n_s += 1
        elif bond.order == BOND_DOUBLE:
            n_d += 1
        elif bond.order == BOND_TRIPLE:
            n_t += 1
    in_r3 = any(len(r) == 3 and i in r for r in mol.rings)

    if atom.aromatic:
        if atom.element == "O":
            return "o-aa" if n_a == 2 else None
        if q == 0:
            if h == 0:
                if n_a == 3:
                    return "n-aaa"
                if n_a == 2 and n_s == 1:
                    return "n-saa"
                if n_a == 2 and n_d == 1:
                    return "n-daa"
                if n_a == 2:
                    return "n-aa"
            elif h == 1 and n_a == 2:
                return "nH-aa"
        elif q == 1:
            if h == 0:
                if n_a == 3:
                    return "n+-aaa"
                if n_a == 2 and n_s == 1:
                    return "n+-saa"
            elif h == 1 and n_a == 2:
                return "nH+-aa"
        return None

    sig = (n_s, n_d, n_t)
    if atom.element == "O":
        if q == -1 and sig == (1, 0, 0):
            return "O--s"
        if q == 0:
            if h == 1 and sig == (1, 0, 0):
                return "OH-s"
            if h == 0 and sig == (2, 0, 0):
                return "O-ss-r3" if in_r3 else "O-ss"
            if h == 0 and sig == (0, 1, 0):
                return "O-d"
        return None
    if q == 0:
        if h == 0:
            return {(3, 0, 0): "N-sss-r3" if in_r3 else "N-sss",
                    (1, 1, 0): "N-sd", (0, 0, 1): "N-t",
                    (1, 2, 0): "N-sdd", (0, 1, 1): "N-dt"}.get(sig)
        if h == 1:
            return {(2, 0, 0): "NH-ss-r3" if in_r3 else "NH-ss",
                    (0, 1, 0): "NH-d"}.get(sig)
        if h == 2 and sig == (1, 0, 0):
            return "NH2-s"
    elif q == 1:
        if h == 0:
            return {(4, 0, 0): "N+-ssss", (2, 1, 0): "N+-ssd",
                    (1, 0, 1): "N+-t"}.get(sig)
        if h == 1:
            return {(3, 0, 0): "NH+-ss", (1, 1, 0): "NH+-d"}.get(sig)
        if h == 2:
            return {(2, 0, 0): "NH2+-s", (0, 1, 0): "NH2+-d"}.get(sig)
        if h == 3 and sig == (1, 0, 0):
            return "NH3+-s"
    return None


def tpsa(mol: Molecule, tables: ParameterTables | None = None) -> float:
    t = tables or default_tables()
    total = 0.0
    for i, atom in enumerate(mol.atoms):
        if atom.element not in ("N", "O"):
            continue
        label = _tpsa_label(mol, i)
        if label is not None:
            total += t.tpsa_values[label]
        else:
            # generic fallback for exotic N/O environments
            x = mol.degree(i) + mol.implicit_hydrogens(i)
            h = mol.implicit_hydrogens(i)
            base = 30.5 if atom.element == "N" else 28.5
            scale = 8.2 if atom.element == "N" else 8.6
            total += max(base - x * scale + h * 1.5, 0.0)
    return total


# -- feature counts --------------------------------------------------------

def molecular_weight(mol: Molecule) -> float:
    total = 0.0
    for i, atom in enumerate(mol.atoms):
        total += ATOMIC_WEIGHT[atom.element]
        total += mol.implicit_hydrogens(i) * ATOMIC_WEIGHT["H"]
    return total


def aromatic_ring_count(mol: Molecule) -> int:
    pair_to_bond = {b.key: idx for idx, b in enumerate(mol.bonds)}
    count = 0
    for ring in mol.rings:
        bonds = [pair_to_bond[(min(a, b), max(a, b))]
                 for a, b in zip(ring, ring[1:] + ring[:1])]
        if all(mol.bonds[bi].aromatic for bi in bonds):
            count += 1
    return count


def count_features(mol: Molecule, tables: ParameterTables | None = None
                   ) -> tuple[int, int, int, int, int, float]:
    """(hbd, hba, rot_bonds, aromatic_rings, alerts, mw)."""
    t = tables or default_tables()
    from .smarts import find_matches
    hbd = len(find_matches(t.feature_patterns["hbd"], mol))
    hba = len(find_matches(t.feature_patterns["hba"], mol))
    rot = len(find_matches(t.feature_patterns["rotatable"], mol))
    rings = aromatic_ring_count(mol)
    present = {ATOMIC_NUMBER[a.element] for a in mol.atoms}
    alerts = 0
    for (_, p), prescreen in zip(t.alert_patterns, t.alert_prescreens):
        if any(present.isdisjoint(s) for s in prescreen):
            continue
        if has_match(p, mol):
            alerts += 1
    return hbd, hba, rot, rings, alerts, molecular_weight(mol)


# -- ring complexity helpers ----------------------------------------------

def spiro_and_bridgehead_counts(mol: Molecule) -> tuple[int, int]:
    rings = [set(r) for r in mol.rings]
    ring_bonds = []
    for r in mol.rings:
        ring_bonds.append({(min(a, b), max(a, b))
                           for a, b in zip(r, r[1:] + r[:1])})
    spiro: set[int] = set()
    bridge: set[int] = set()
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            shared_atoms = rings[i] & rings[j]
            shared_bonds = ring_bonds[i] & ring_bonds[j]
            if len(shared_atoms) == 1 and not shared_bonds:
                spiro |= shared_atoms
            elif len(shared_bonds) >= 2:
                # endpoints of the shared bond path are the bridgeheads
                counts: dict[int, int] = {}
                for a, b in shared_bonds:
                    counts[a] = counts.get(a, 0) + 1
                    counts[b] = counts.get(b, 0) + 1
                bridge |= {a for a, c in counts.items() if c == 1}
    return len(spiro), len(bridge)


# -- synthetic accessibility ----------------------------------------------

def sa_score(mol: Molecule, tables: ParameterTables | None = None) -> float:
    """Fragment-frequency score minus complexity penalties, scaled to [1,10]."""
    t = tables or default_tables()
    if not t.sa_fragment_scores:
        raise MissingTable("sa_fragment_scores table is empty or missing")
    envs = morgan_environments(mol, radius=2)
    nf = sum(envs.values())
    frag = sum(t.sa_fragment_scores.get(h, -4.0) * c for h, c in envs.items())
    frag /= max(nf, 1)

    n_atoms = mol.heavy_atom_count()
    n_chiral = sum(1 for a in mol.atoms if a.stereo)
    n_spiro, n_bridge = spiro_and_bridgehead_counts(mol)
    n_macro = sum(1 for r in mol.rings if len(r) > 8)

    size_penalty = n_atoms ** 1.005 - n_atoms
    stereo_penalty = math.log10(n_chiral + 1)
    spiro_penalty = math.log10(n_spiro + 1)
    bridge_penalty = math.log10(n_bridge + 1)
    macro_penalty = math.log10(2) if n_macro else 0.0
    complexity = (size_penalty + stereo_penalty + spiro_penalty
                  + bridge_penalty + macro_penalty)

    symmetry = 0.0
    if n_atoms > len(envs):
        symmetry = math.log(n_atoms / len(envs)) * 0.5

    raw = frag - complexity + symmetry
    score = 11.0 - (raw + 4.0 + 1.0) / (2.5 + 4.0) * 9.0
    if score > 8.0:
        score = 8.0 + math.log(score + 1.0 - 9.0)
    return min(max(score, 1.0), 10.0)


# -- natural-product likeness ---------------------------------------------

def np_score(mol: Molecule, tables: ParameterTables | None = None) -> float:
    t = tables or default_tables()
    if not t.np_fragment_scores:
        raise MissingTable("np_fragment_scores table is empty or missing")
    envs = morgan_environments(mol, radius=2)
    score = sum(t.np_fragment_scores.get(h, 0.0) for h in envs)
    score /= max(mol.heavy_atom_count(), 1)
    if score > 4.0:
        score = 4.0 + math.log10(score - 4.0 + 1.0)
    elif score < -4.0:
        score = -4.0 - math.log10(-4.0 - score + 1.0)
    return min(max(score, -5.0), 5.0)


# -- drug-likeness ---------------------------------------------------------

def _ads(x: float, p: dict[str, float]) -> float:
    exp1 = 1.0 + math.exp(-(x - p["c"] + p["d"] / 2.0) / p["e"])
    exp2 = 1.0 + math.exp(-(x - p["c"] - p["d"] / 2.0) / p["f"])
    return (p["a"] + p["b"] / exp1 * (1.0 - 1.0 / exp2)) / p["dmax"]


def weighted_geometric_mean(values: list[float], weights: list[float]) -> float:
    num = sum(w * math.log(v) for v, w in zip(values, weights))
    return math.exp(num / sum(weights))


def qed_from_properties(values: dict[str, float],
                        tables: ParameterTables | None = None) -> float:
    """Weighted geometric mean of desirabilities over the 8 properties."""
    t = tables or default_tables()
    if not t.qed_params:
        raise MissingTable("qed parameter table missing")
    ds = []
    ws = []
    for name, p in t.qed_params.items():
        ds.append(max(_ads(values[name], p), 0.003))
        ws.append(p["weight"])
    return weighted_geometric_mean(ds, ws)


def qed(mol: Molecule, tables: ParameterTables | None = None) -> float:
    t = tables or default_tables()
    hbd, hba, rot, rings, alerts, mw = count_features(mol, t)
    values = {"mw": mw, "logp": crippen_logp(mol, t), "hba": hba, "hbd": hbd,
              "tpsa": tpsa(mol, t), "rot_bonds": rot,
              "aromatic_rings": rings, "alerts": alerts}
    return qed_from_properties(values, t)


# -- one-shot evaluation ---------------------------------------------------

def compute_raw(mol: Molecule,
                tables: ParameterTables | None = None) -> RawDescriptors:
    t = tables or default_tables()
    hbd, hba, rot, rings, alerts, mw = count_features(mol, t)
    logp = crippen_logp(mol, t)
    psa = tpsa(mol, t)
    values = {"mw": mw, "logp": logp, "hba": hba, "hbd": hbd, "tpsa": psa,
              "rot_bonds": rot, "aromatic_rings": rings, "alerts": alerts}
    return RawDescriptors(
        logp=logp, tpsa=psa, mw=mw, hbd=hbd, hba=hba, rot_bonds=rot,
        aromatic_rings=rings, alerts=alerts,
        sa_raw=sa_score(mol, t), qed_raw=qed_from_properties(values, t),
        np_raw=np_score(mol, t))
