"""Command-line surface: evaluate, score-dataset, canonicalize, descriptors.

Reports render as csv, json, or markdown with identical numbers (2-decimal
percentages); undefined cells print literally as NA.  Exit codes: 0 ok,
2 usage, 3 adapter protocol, 4 adapter timeout, 5 dataset/split error,
6 unsupported adapter capability.
"""

from __future__ import annotations

import json
import os
import sys
import time
from dataclasses import dataclass, field

import click

from . import __version__
from .descriptors import (NormalizationSpec, compute_raw, default_tables,
                          normalize)
from .errors import (AdapterProtocolError, AdapterTimeout, AdapterUnsupported,
                     EmptyValidSet, InvalidMolecule, SplitError)
from .harness import (Dataset, RunConfig, SubprocessAdapter, build_references,
                      builtin_generator, load_dataset, run_reconstruction_process,
                      run_sampling_process)
from .metrics import GenerationBatch, property_metrics
from .smiles import canonicalize

METRIC_ORDER = ("validity", "novelty", "uniqueness", "diversity",
                "np", "sol", "sas", "qed", "reconstruction")

EXIT_CODES = {AdapterProtocolError: 3, AdapterTimeout: 4,
              SplitError: 5, AdapterUnsupported: 6}


@dataclass
class ReportDocument:
    rows: list[tuple[str, list[str]]]
    header: list[str]
    metadata: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(
                {"rows": {name: dict(zip(self.header, cells))
                          for name, cells in self.rows},
                 "metadata": self.metadata}, indent=2, sort_keys=True)
        if fmt == "csv":
            lines = ["name," + ",".join(self.header)]
            for name, cells in self.rows:
                lines.append(name + "," + ",".join(cells))
            for key in sorted(self.metadata):
                lines.append(f"# {key}={self.metadata[key]}")
            return "\n".join(lines)
        if fmt == "markdown":
            widths = [max(len(self.header[i]),
                          *(len(cells[i]) for _, cells in self.rows),
                          *(0,))
                      for i in range(len(self.header))]
            name_w = max(len("metric"), *(len(n) for n, _ in self.rows))
            def row(name, cells):
                body = " | ".join(c.ljust(w) for c, w in zip(cells, widths))
                return f"| {name.ljust(name_w)} | {body} |"
            lines = [row("metric", self.header),
                     row("-" * name_w, ["-" * w for w in widths])]
            lines += [row(name, cells) for name, cells in self.rows]
            lines.append("")
            lines += [f"<!-- {k}: {self.metadata[k]} -->"
                      for k in sorted(self.metadata)]
            return "\n".join(lines)
        raise ValueError(f"unknown format {fmt!r}")


def _fmt_cell(value) -> str:
    return "NA" if value is None else f"{value:.2f}"


def _metric_rows(metrics: dict) -> list[tuple[str, list[str]]]:
    rows = []
    for name in METRIC_ORDER:
        if name not in metrics:
            continue
        cell = metrics[name]
        if cell is None:
            rows.append((name, ["NA", "NA"]))
        else:
            mean, std = cell
            rows.append((name, [_fmt_cell(mean), _fmt_cell(std)]))
    return rows


def _emit(doc: ReportDocument, fmt: str, out: str | None) -> None:
    text = doc.render(fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(
                    f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve_dataset(spec: str) -> tuple[str, str | None, str | None, str]:
    """A path, or a short name resolved under MOLBENCH_DATA_DIR."""
    if os.path.exists(spec):
        name = os.path.splitext(os.path.basename(spec))[0]
        return spec, None, None, name
    data_dir = os.environ.get("MOLBENCH_DATA_DIR", "")
    candidate = os.path.join(data_dir, spec + ".smi")
    if data_dir and os.path.exists(candidate):
        def opt(suffix):
            p = os.path.join(data_dir, f"{spec}.{suffix}.idx")
            return p if os.path.exists(p) else None
        return candidate, opt("train"), opt("test"), spec
    raise click.UsageError(
        f"dataset {spec!r} is neither a file nor a name under "
        f"MOLBENCH_DATA_DIR")


def _make_adapter(spec: str, dataset: Dataset, timeout: float):
    if spec.startswith("builtin:"):
        kind, _, order = spec[len("builtin:"):].partition(":")
        return builtin_generator(kind, dataset.train_smiles(),
                                 order=int(order) if order else 10)
    if spec.startswith("exec:"):
        return SubprocessAdapter(spec[len("exec:"):].split(), timeout=timeout)
    raise click.UsageError(
        f"generator {spec!r} must be builtin:<kind> or exec:<command>")


def _common_metadata(cfg: RunConfig | None = None) -> dict:
    meta = {"tool_version": __version__}
    if cfg is not None:
        meta.update({k: str(v) for k, v in cfg.snapshot().items()})
    return meta


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Evaluation testbed for molecule generators."""


def _run_config_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      help="Key=value config file; flags override it.")(fn)
    fn = click.option("--threads", type=int, default=None)(fn)
    fn = click.option("--format", "fmt",
                      type=click.Choice(["csv", "json", "markdown"]),
                      default="markdown")(fn)
    fn = click.option("--out", type=click.Path(), default=None)(fn)
    return fn


@main.command()
@click.option("--dataset", required=True)
@click.option("--train-split", type=click.Path(exists=True), default=None)
@click.option("--test-split", type=click.Path(exists=True), default=None)
@click.option("--generator", required=True)
@click.option("--n", "n_samples", type=int, default=None)
@click.option("--samples-per-input", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--diversity-k", type=int, default=None)
@click.option("--timeout", type=float, default=None)
@_run_config_options
def evaluate(dataset, train_split, test_split, generator, n_samples,
             samples_per_input, seed, diversity_k, timeout, config_path,
             threads, fmt, out):
    """Run the sampling process and, if the adapter can, reconstruction."""
    file_cfg = _load_config_file(config_path) if config_path else {}

    def setting(flag_value, key, cast, default):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return cast(file_cfg[key])
        return default

    cfg = RunConfig(
        n_samples=setting(n_samples, "n", int, 20000),
        samples_per_input=setting(samples_per_input, "samples_per_input",
                                  int, 20),
        seed=setting(seed, "seed", int, 0),
        diversity_k=setting(diversity_k, "diversity_k", int, 100),
        timeout=setting(timeout, "timeout", float, 600.0),
        threads=setting(threads, "threads", int, 1))

    started = time.monotonic()
    adapter = None
    try:
        path, tr, te, name = _resolve_dataset(dataset)
        ds = load_dataset(path, train_split or tr, test_split or te, name)
        adapter = _make_adapter(generator, ds, cfg.timeout)
        caps = adapter.handshake()
        metrics: dict = {}
        if caps["sample"]:
            refs = build_references(ds, cfg)
            metrics.update(run_sampling_process(
                adapter, cfg, refs, ds.content_hash).metrics)
        report = run_reconstruction_process(adapter, cfg, ds) \
            if caps["reconstruct"] else None
        metrics["reconstruction"] = (report.metrics["reconstruction"]
                                     if report else None)
        meta = _common_metadata(cfg)
        meta.update({"dataset": ds.path, "dataset_hash": ds.content_hash,
                     "adapter": f"{adapter.name} {adapter.version}",
                     "wall_clock_s": f"{time.monotonic() - started:.1f}"})
        _emit(ReportDocument(_metric_rows(metrics), ["mean", "std"], meta),
              fmt, out)
    except tuple(EXIT_CODES) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_CODES[type(exc)])
    finally:
        if adapter is not None:
            adapter.close()


@main.command("score-dataset")
@click.option("--dataset", required=True)
@click.option("--train-split", type=click.Path(exists=True), default=None)
@click.option("--test-split", type=click.Path(exists=True), default=None)
@click.option("--split", type=click.Choice(["all", "train", "test"]),
              default="all")
@_run_config_options
def score_dataset(dataset, train_split, test_split, split, config_path,
                  threads, fmt, out):
    """Property metrics (NP/Sol/SAS/QED mean and std) over a dataset."""
    try:
        path, tr, te, name = _resolve_dataset(dataset)
        ds = load_dataset(path, train_split or tr, test_split or te, name)
    except SplitError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CODES[SplitError])
    if split == "train":
        indices = ds.train_indices
    elif split == "test":
        indices = ds.test_indices
    else:
        indices = list(range(len(ds.molecules)))
    batch = GenerationBatch(
        raw_outputs=[ds.molecules[i][0] for i in indices],
        parsed=[ds.molecules[i][1] for i in indices],
        canonical=[ds.molecules[i][2] for i in indices],
        errors=[None] * len(indices))
    try:
        props = property_metrics(batch)
    except EmptyValidSet as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(5)
    meta = _common_metadata()
    meta.update({"dataset": ds.path, "dataset_hash": ds.content_hash,
                 "n_molecules": str(len(indices)), "split": split,
                 "n_rejected": str(len(ds.rejected))})
    rows = [(n, [_fmt_cell(m), _fmt_cell(s)]) for n, (m, s) in props.items()]
    _emit(ReportDocument(rows, ["mean", "std"], meta), fmt, out)


@main.command()
@click.argument("input", type=click.File("r"), default="-")
@click.argument("output", type=click.File("w"), default="-")
def canonicalize_cmd(input, output):
    """Canonicalize SMILES, one per line; invalid lines become INVALID."""
    for line in input:
        text = line.strip()
        if not text:
            continue
        try:
            output.write(canonicalize(text).text + "\n")
        except InvalidMolecule as exc:
            output.write(f"INVALID {exc}\n")


main.add_command(canonicalize_cmd, name="canonicalize")

DESCRIPTOR_COLUMNS = ("logp", "tpsa", "mw", "hbd", "hba", "rot_bonds",
                      "aromatic_rings", "alerts", "sa_raw", "qed_raw",
                      "np_raw", "np_pct", "sol_pct", "sas_pct", "qed_pct")


@main.command()
@click.argument("input", type=click.File("r"), default="-")
@_run_config_options
def descriptors(input, config_path, threads, fmt, out):
    """Per-molecule raw and normalized descriptor table."""
    from .smiles import parse_sanitized
    tables = default_tables()
    rows = []
    for line in input:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            raw = compute_raw(parse_sanitized(text), tables)
            pcts = normalize(raw)
            cells = [f"{getattr(raw, c):.4f}" if isinstance(getattr(raw, c), float)
                     else str(getattr(raw, c))
                     for c in DESCRIPTOR_COLUMNS[:11]]
            cells += [f"{p:.2f}" for p in pcts]
        except InvalidMolecule as exc:
            cells = ["NA"] * len(DESCRIPTOR_COLUMNS)
            text = f"{text} ({exc})"
        rows.append((text, cells))
    meta = _common_metadata()
    meta["table_hashes"] = json.dumps(tables.content_hashes, sort_keys=True)
    _emit(ReportDocument(rows, list(DESCRIPTOR_COLUMNS), meta), fmt, out)


if __name__ == "__main__":
    main()
