"""Batch metrics over generated molecules.

Nine metrics total: validity, novelty, uniqueness, reconstruction,
diversity, and the four normalized property scores.  Aggregates are
(mean, population std) pairs except uniqueness, which is a single ratio.
Metrics undefined on an empty valid set raise EmptyValidSet; report
assembly renders those cells as NA.
"""

from __future__ import annotations

import hashlib
import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .descriptors import (NormalizationSpec, ParameterTables, compute_raw,
                          default_tables, normalize)
from .errors import EmptyValidSet, InvalidMolecule, ParseError
from .fingerprints import Fingerprint, morgan_fingerprint, tanimoto
from .molgraph import Molecule
from .smiles import CanonicalSmiles, canonicalize_mol, parse_sanitized

PROPERTY_NAMES = ("np", "sol", "sas", "qed")


@dataclass
class GenerationBatch:
    """Raw generator outputs with per-item parse outcomes."""

    raw_outputs: list[str]
    parsed: list[Molecule | None]
    canonical: list[CanonicalSmiles | None]
    errors: list[str | None]

    @classmethod
    def from_outputs(cls, raw_outputs: list[str]) -> "GenerationBatch":
        parsed: list[Molecule | None] = []
        canonical: list[CanonicalSmiles | None] = []
        errors: list[str | None] = []
        for text in raw_outputs:
            try:
                mol = parse_sanitized(text)
                parsed.append(mol)
                canonical.append(canonicalize_mol(mol))
                errors.append(None)
            except (ParseError, InvalidMolecule) as exc:
                parsed.append(None)
                canonical.append(None)
                errors.append(str(exc))
        return cls(list(raw_outputs), parsed, canonical, errors)

    @property
    def valid_indices(self) -> list[int]:
        return [i for i, m in enumerate(self.parsed) if m is not None]

    def __len__(self) -> int:
        return len(self.raw_outputs)


@dataclass(frozen=True)
class ReferenceSets:
    training_canon: frozenset[str]
    diversity_pool: tuple[Fingerprint, ...]

    @classmethod
    def from_training(cls, molecules: list[Molecule], radius: int = 2,
                      width: int = 2048) -> "ReferenceSets":
        canon = frozenset(canonicalize_mol(m).text for m in molecules)
        pool = tuple(morgan_fingerprint(m, radius=radius, width=width)
                     for m in molecules)
        return cls(canon, pool)


@dataclass
class MetricReport:
    """Per-metric (mean, std) cells plus counts and the config snapshot.

    A cell value of None means NA; a std of None means the metric carries
    no dispersion (uniqueness).
    """

    metrics: dict[str, tuple[float, float | None] | None]
    n_generated: int = 0
    n_valid: int = 0
    n_unique: int = 0
    n_novel: int = 0
    config: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)


def _mean_std(values: list[float]) -> tuple[float, float]:
    return (statistics.fmean(values),
            statistics.pstdev(values) if len(values) > 1 else 0.0)


def validity(batch: GenerationBatch
             ) -> tuple[list[bool], float | None, float | None]:
    flags = [m is not None for m in batch.parsed]
    if not flags:
        return flags, None, None
    mean, std = _mean_std([100.0 if f else 0.0 for f in flags])
    return flags, mean, std


def novelty(batch: GenerationBatch,
            refs: ReferenceSets) -> tuple[float, float]:
    indicators = [100.0 if batch.canonical[i].text not in refs.training_canon
                  else 0.0
                  for i in batch.valid_indices]
    if not indicators:
        raise EmptyValidSet("novelty undefined: no valid molecules")
    return _mean_std(indicators)


def uniqueness(batch: GenerationBatch) -> float:
    valid = batch.valid_indices
    if not valid:
        raise EmptyValidSet("uniqueness undefined: no valid molecules")
    distinct = {batch.canonical[i].text for i in valid}
    return 100.0 * len(distinct) / len(valid)


def reconstruction(inputs: list[CanonicalSmiles],
                   outputs: list[list[str]]) -> tuple[float, float]:
    """Indicator per (input, output) pair: valid and canonically equal."""
    indicators = []
    for target, decoded in zip(inputs, outputs):
        for text in decoded:
            try:
                ok = canonicalize_mol(parse_sanitized(text)).text == target.text
            except (ParseError, InvalidMolecule):
                ok = False
            indicators.append(100.0 if ok else 0.0)
    if not indicators:
        raise EmptyValidSet("reconstruction undefined: no outputs")
    return _mean_std(indicators)


def _map_ordered(fn, items: list, threads: int) -> list:
    """Order-preserving map; results are identical for any thread count."""
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _molecule_seed(canonical: str, seed: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{canonical}".encode(),
                             digest_size=8).digest()
    return int.from_bytes(digest, "big")


def diversity(batch: GenerationBatch, refs: ReferenceSets, k: int = 100,
              seed: int = 0, radius: int = 2, width: int = 2048,
              threads: int = 1) -> tuple[float, float]:
    """Mean Tanimoto distance to k seeded-random training fingerprints.

    The per-molecule RNG is seeded from (run seed, canonical form) so the
    result is invariant to batch order and thread count.
    """
    if not refs.diversity_pool:
        raise EmptyValidSet("diversity undefined: empty reference pool")
    pool = refs.diversity_pool

    def score(i: int) -> float:
        fp = morgan_fingerprint(batch.parsed[i], radius=radius, width=width)
        rng = random.Random(_molecule_seed(batch.canonical[i].text, seed))
        total = 0.0
        for _ in range(k):
            total += 1.0 - tanimoto(fp, pool[rng.randrange(len(pool))])
        return 100.0 * total / k

    scores = _map_ordered(score, batch.valid_indices, threads)
    if not scores:
        raise EmptyValidSet("diversity undefined: no valid molecules")
    return _mean_std(scores)


def property_metrics(batch: GenerationBatch,
                     tables: ParameterTables | None = None,
                     spec: NormalizationSpec = NormalizationSpec(),
                     threads: int = 1) -> dict[str, tuple[float, float]]:
    t = tables or default_tables()
    rows = _map_ordered(
        lambda i: normalize(compute_raw(batch.parsed[i], t), spec),
        batch.valid_indices, threads)
    columns: dict[str, list[float]] = {name: [] for name in PROPERTY_NAMES}
    for values in rows:
        for name, v in zip(PROPERTY_NAMES, values):
            columns[name].append(v)
    if not columns["np"]:
        raise EmptyValidSet("property metrics undefined: no valid molecules")
    return {name: _mean_std(vals) for name, vals in columns.items()}
