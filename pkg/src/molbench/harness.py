"""Dataset loading, generator adapters, and the two evaluation processes.

Adapters speak a newline-delimited JSON protocol over stdin/stdout (see
README for the wire format).  Builtin baseline generators implement the
same interface in-process so the harness can be exercised without any
trained model.
"""

from __future__ import annotations

import hashlib
import json
import queue
import random
import subprocess
import threading
from collections import Counter
from dataclasses import dataclass, field

from .descriptors import NormalizationSpec, default_tables
from .errors import (AdapterProtocolError, AdapterTimeout, AdapterUnsupported,
                     EmptyTrainingSet, InvalidMolecule, SplitError)
from .metrics import (GenerationBatch, MetricReport, ReferenceSets, diversity,
                      novelty, property_metrics, reconstruction, uniqueness,
                      validity)
from .errors import EmptyValidSet
from .molgraph import Molecule
from .smiles import CanonicalSmiles, canonicalize_mol, parse_sanitized

HEAVY_ATOM_LIMITS = {"qm9": 9, "zinc": 38}


# -- datasets --------------------------------------------------------------

@dataclass
class Dataset:
    name: str
    molecules: list[tuple[str, Molecule, CanonicalSmiles]]
    train_indices: list[int]
    test_indices: list[int]
    path: str
    content_hash: str
    rejected: list[tuple[int, str, str]] = field(default_factory=list)
    size_violations: list[int] = field(default_factory=list)

    def train_molecules(self) -> list[Molecule]:
        return [self.molecules[i][1] for i in self.train_indices]

    def train_smiles(self) -> list[str]:
        return [self.molecules[i][0] for i in self.train_indices]

    def test_canonical(self) -> list[CanonicalSmiles]:
        return [self.molecules[i][2] for i in self.test_indices]


def _read_lines(path: str) -> tuple[list[str], str]:
    with open(path, "rb") as fh:
        data = fh.read()
    digest = hashlib.sha256(data).hexdigest()
    lines = []
    for line in data.decode("utf-8").splitlines():
        for i, ch in enumerate(line):
            if ch == "#" and (i == 0 or line[i - 1] in " \t"):
                line = line[:i]
                break
        line = line.strip()
        if line:
            lines.append(line)
    return lines, digest


def _read_split(path: str, size: int) -> list[int]:
    lines, _ = _read_lines(path)
    out = []
    for text in lines:
        try:
            idx = int(text)
        except ValueError:
            raise SplitError(f"non-integer split entry {text!r} in {path}")
        if not 0 <= idx < size:
            raise SplitError(f"split index {idx} out of range 0..{size - 1}")
        out.append(idx)
    return out


def load_dataset(path: str, train_split: str | None = None,
                 test_split: str | None = None,
                 name: str = "custom") -> Dataset:
    """Load a SMILES-per-line file; malformed lines are collected, not
    silently dropped.  Split files hold one index per line into the list
    of successfully loaded molecules."""
    lines, digest = _read_lines(path)
    molecules = []
    rejected = []
    for lineno, text in enumerate(lines):
        try:
            mol = parse_sanitized(text)
            molecules.append((text, mol, canonicalize_mol(mol)))
        except InvalidMolecule as exc:
            rejected.append((lineno, text, str(exc)))

    limit = HEAVY_ATOM_LIMITS.get(name.lower())
    violations = []
    if limit is not None:
        violations = [i for i, (_, m, _) in enumerate(molecules)
                      if m.heavy_atom_count() > limit]

    n = len(molecules)
    train = _read_split(train_split, n) if train_split else list(range(n))
    test = _read_split(test_split, n) if test_split else []
    overlap = set(train) & set(test)
    if overlap:
        raise SplitError(f"train/test overlap on {len(overlap)} indices, "
                         f"e.g. {sorted(overlap)[:3]}")
    return Dataset(name, molecules, train, test, path, digest,
                   rejected, violations)


# -- run configuration -----------------------------------------------------

@dataclass
class RunConfig:
    n_samples: int = 20000
    samples_per_input: int = 20
    seed: int = 0
    radius: int = 2
    width: int = 2048
    diversity_k: int = 100
    normalization: NormalizationSpec = field(default_factory=NormalizationSpec)
    timeout: float = 600.0
    threads: int = 1

    def snapshot(self) -> dict:
        return {"n_samples": self.n_samples,
                "samples_per_input": self.samples_per_input,
                "seed": self.seed, "radius": self.radius,
                "width": self.width, "diversity_k": self.diversity_k,
                "normalization": self.normalization.as_dict(),
                "timeout": self.timeout, "threads": self.threads}


# -- adapters --------------------------------------------------------------

class BuiltinAdapter:
    """In-process generator with the same surface as a subprocess adapter."""

    kind = "builtin"

    def __init__(self, name: str, can_sample: bool, can_reconstruct: bool):
        self.name = name
        self.version = "1"
        self.capabilities = {"sample": can_sample,
                             "reconstruct": can_reconstruct}

    def handshake(self) -> dict:
        return self.capabilities

    def sample(self, n: int, seed: int) -> list[str]:
        raise AdapterUnsupported(f"{self.name} cannot sample")

    def reconstruct(self, smiles: list[str], samples_per_input: int,
                    seed: int) -> list[list[str]]:
        raise AdapterUnsupported(f"{self.name} cannot reconstruct")

    def close(self) -> None:
        pass


class ReplayGenerator(BuiltinAdapter):
    """Uniform with-replacement sampling of training SMILES."""

    def __init__(self, train_smiles: list[str]):
        super().__init__("builtin:replay", True, False)
        if not train_smiles:
            raise EmptyTrainingSet("replay generator needs training SMILES")
        self._train = list(train_smiles)

    def sample(self, n: int, seed: int) -> list[str]:
        rng = random.Random(seed)
        return [self._train[rng.randrange(len(self._train))]
                for _ in range(n)]


SMILES_ALPHABET = list("CNOSPFIcnos123456789=#()[]+-") + ["Cl", "Br"]


class RandomCharGenerator(BuiltinAdapter):
    """Uniform random strings over the SMILES alphabet; lengths follow the
    training length distribution."""

    def __init__(self, train_smiles: list[str]):
        super().__init__("builtin:random_chars", True, False)
        self._lengths = [len(s) for s in train_smiles] or [10]

    def sample(self, n: int, seed: int) -> list[str]:
        rng = random.Random(seed)
        out = []
        for _ in range(n):
            length = self._lengths[rng.randrange(len(self._lengths))]
            out.append("".join(SMILES_ALPHABET[rng.randrange(
                len(SMILES_ALPHABET))] for _ in range(length)))
        return out


_START = "\x02"
_END = "\x03"


class NgramGenerator(BuiltinAdapter):
    """Order-n character model with backoff, fitted on training SMILES."""

    def __init__(self, train_smiles: list[str], order: int = 10):
        super().__init__(f"builtin:ngram{order}", True, False)
        if not train_smiles:
            raise EmptyTrainingSet("ngram generator needs training SMILES")
        self.order = order
        self._counts: dict[str, Counter] = {}
        for s in train_smiles:
            padded = _START * (order - 1) + s + _END
            for i in range(order - 1, len(padded)):
                for ctx_len in range(order):
                    ctx = padded[i - ctx_len:i]
                    self._counts.setdefault(ctx, Counter())[padded[i]] += 1

    def _draw(self, context: str, rng: random.Random) -> str:
        for start in range(len(context) + 1):
            counts = self._counts.get(context[start:])
            if counts:
                chars = sorted(counts)
                weights = [counts[c] for c in chars]
                return rng.choices(chars, weights=weights)[0]
        return _END

    def sample(self, n: int, seed: int) -> list[str]:
        rng = random.Random(seed)
        out = []
        for _ in range(n):
            text = _START * (self.order - 1)
            while len(text) < self.order - 1 + 400:
                ch = self._draw(text[-(self.order - 1):], rng)
                if ch == _END:
                    break
                text += ch
            out.append(text[self.order - 1:])
        return out


class EchoAdapter(BuiltinAdapter):
    """Perfect autoencoder stand-in: reconstruction returns the input."""

    def __init__(self, train_smiles: list[str] | None = None):
        super().__init__("builtin:echo", bool(train_smiles), True)
        self._train = list(train_smiles or [])

    def sample(self, n: int, seed: int) -> list[str]:
        if not self._train:
            raise AdapterUnsupported("echo adapter has no sample pool")
        rng = random.Random(seed)
        return [self._train[rng.randrange(len(self._train))]
                for _ in range(n)]

    def reconstruct(self, smiles: list[str], samples_per_input: int,
                    seed: int) -> list[list[str]]:
        return [[s] * samples_per_input for s in smiles]


def builtin_generator(kind: str, train_smiles: list[str],
                      seed: int = 0, order: int = 10) -> BuiltinAdapter:
    if kind == "replay":
        return ReplayGenerator(train_smiles)
    if kind == "random_chars":
        return RandomCharGenerator(train_smiles)
    if kind == "ngram":
        return NgramGenerator(train_smiles, order)
    if kind == "echo":
        return EchoAdapter(train_smiles)
    raise ValueError(f"unknown builtin generator {kind!r}")


class SubprocessAdapter:
    """Generator in an external process, spoken to over stdin/stdout with
    newline-delimited JSON.  A crash or malformed line surfaces as a
    structured error, never a harness crash."""

    kind = "subprocess"

    def __init__(self, command: list[str], timeout: float = 600.0):
        self.command = command
        self.timeout = timeout
        self.name = command[0]
        self.version = "?"
        self.capabilities = {"sample": False, "reconstruct": False}
        self._proc = subprocess.Popen(
            command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, bufsize=1)
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        try:
            for line in self._proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(None)  # EOF sentinel

    def _send(self, obj: dict) -> None:
        try:
            self._proc.stdin.write(json.dumps(obj) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterProtocolError(f"adapter pipe closed: {exc}") from exc

    def _recv(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise AdapterTimeout(
                f"no adapter response within {self.timeout}s")
        if line is None:
            raise AdapterProtocolError("adapter closed its output stream")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterProtocolError(
                f"malformed adapter line {line!r:.80}") from exc
        if not isinstance(obj, dict):
            raise AdapterProtocolError(f"expected JSON object, got {obj!r:.80}")
        return obj

    def handshake(self) -> dict:
        self._send({"cmd": "capabilities"})
        obj = self._recv()
        caps = obj.get("capabilities")
        if not isinstance(caps, dict) or \
                not {"sample", "reconstruct"} <= caps.keys():
            raise AdapterProtocolError(f"malformed handshake {obj!r:.120}")
        self.capabilities = {"sample": bool(caps["sample"]),
                             "reconstruct": bool(caps["reconstruct"])}
        self.name = str(obj.get("name", self.name))
        self.version = str(obj.get("version", "?"))
        return self.capabilities

    def sample(self, n: int, seed: int) -> list[str]:
        if not self.capabilities["sample"]:
            raise AdapterUnsupported(f"{self.name} cannot sample")
        self._send({"cmd": "sample", "n": n, "seed": seed})
        out: list[str] = []
        while True:
            obj = self._recv()
            if obj.get("done"):
                return out
            if "smiles" not in obj:
                raise AdapterProtocolError(
                    f"unexpected sample message {obj!r:.80}")
            out.append(str(obj["smiles"]))
            if len(out) > n:
                raise AdapterProtocolError("adapter sent more than requested")

    def reconstruct(self, smiles: list[str], samples_per_input: int,
                    seed: int) -> list[list[str]]:
        if not self.capabilities["reconstruct"]:
            raise AdapterUnsupported(f"{self.name} cannot reconstruct")
        self._send({"cmd": "reconstruct", "smiles": list(smiles),
                    "samples_per_input": samples_per_input, "seed": seed})
        out: list[list[str]] = [[] for _ in smiles]
        while True:
            obj = self._recv()
            if obj.get("done"):
                return out
            if "index" not in obj or "outputs" not in obj:
                raise AdapterProtocolError(
                    f"unexpected reconstruct message {obj!r:.80}")
            idx = obj["index"]
            if not isinstance(idx, int) or not 0 <= idx < len(smiles):
                raise AdapterProtocolError(f"reconstruct index {idx!r} "
                                           "out of range")
            out[idx] = [str(s) for s in obj["outputs"]]

    def close(self) -> None:
        try:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
        except Exception:
            self._proc.kill()


# -- evaluation processes --------------------------------------------------

def build_references(dataset: Dataset, cfg: RunConfig) -> ReferenceSets:
    return ReferenceSets.from_training(dataset.train_molecules(),
                                       radius=cfg.radius, width=cfg.width)


def _base_report(adapter, cfg: RunConfig, dataset_hash: str) -> MetricReport:
    report = MetricReport(metrics={})
    report.config = {"adapter": f"{adapter.name} {adapter.version}",
                     "dataset_hash": dataset_hash,
                     "table_hashes": default_tables().content_hashes,
                     **cfg.snapshot()}
    return report


def run_sampling_process(adapter, cfg: RunConfig, refs: ReferenceSets,
                         dataset_hash: str = "") -> MetricReport:
    if cfg.n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    outputs = adapter.sample(cfg.n_samples, cfg.seed)
    report = _base_report(adapter, cfg, dataset_hash)
    if len(outputs) < cfg.n_samples:
        report.flags.append(
            f"ShortBatch: received {len(outputs)} of {cfg.n_samples}")

    batch = GenerationBatch.from_outputs(outputs)
    flags, pct, std = validity(batch)
    report.n_generated = len(batch)
    report.n_valid = sum(flags)
    report.metrics["validity"] = None if pct is None else (pct, std)

    def cell(fn):
        try:
            return fn()
        except EmptyValidSet:
            return None

    report.metrics["novelty"] = cell(lambda: novelty(batch, refs))
    uniq = cell(lambda: uniqueness(batch))
    report.metrics["uniqueness"] = None if uniq is None else (uniq, None)
    report.metrics["diversity"] = cell(lambda: diversity(
        batch, refs, k=cfg.diversity_k, seed=cfg.seed,
        radius=cfg.radius, width=cfg.width, threads=cfg.threads))
    props = cell(lambda: property_metrics(batch, spec=cfg.normalization,
                                          threads=cfg.threads))
    for name in ("np", "sol", "sas", "qed"):
        report.metrics[name] = None if props is None else props[name]

    valid_canon = {batch.canonical[i].text for i in batch.valid_indices}
    report.n_unique = len(valid_canon)
    report.n_novel = len(valid_canon - refs.training_canon)
    return report


def run_reconstruction_process(adapter, cfg: RunConfig,
                               dataset: Dataset) -> MetricReport:
    report = _base_report(adapter, cfg, dataset.content_hash)
    targets = dataset.test_canonical()
    try:
        decoded = adapter.reconstruct([c.text for c in targets],
                                      cfg.samples_per_input, cfg.seed)
        report.metrics["reconstruction"] = reconstruction(targets, decoded)
        report.n_generated = sum(len(d) for d in decoded)
    except (AdapterUnsupported, EmptyValidSet):
        report.metrics["reconstruction"] = None
    return report
