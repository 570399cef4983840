"""Command-line pipeline: extract -> cluster -> coverage -> eval / bench.

Configuration precedence is flags > ``STAKEFLOW_*`` environment variables >
``--config`` JSON file > built-in defaults; the effective configuration is
echoed into the run manifest so a run can be reproduced from it
(``cluster --config manifest.json``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .clustering import (
    load_seed_table,
    run,
    write_cluster_dump,
    write_manifest,
    write_stakeholder_table,
)
from .corpus import (
    DEFAULT_CONTEXT_WINDOW,
    Document,
    detect_mentions,
    load_gazetteer,
    load_mentions,
    parse_corpus,
)
from .coverage import CoverageMatrix, accumulate, export_by_topic
from .embedding import (
    DEFAULT_DIMENSION,
    DEFAULT_HASH_SEED,
    ExternalVectorProvider,
    HashedTextProvider,
    load_kb,
)
from .errors import StakeflowError
from .evaluation import (
    Prediction,
    complexity_report,
    load_gold,
    make_synthetic_stream,
    pairwise_agreement,
    run_pairwise_baseline,
    score,
)
from .ontology import load_ontology

logger = logging.getLogger(__name__)

ENV_PREFIX = "STAKEFLOW_"

DEFAULTS: dict[str, object] = {
    "threshold": 0.75,
    "dim": DEFAULT_DIMENSION,
    "hash_seed": DEFAULT_HASH_SEED,
    "provider": "hashed",
    "window": DEFAULT_CONTEXT_WINDOW,
    "lenient": False,
}

_PATH_KEYS = ("ontology", "corpus", "gazetteer", "kb", "seeds", "mentions", "stakeholders", "gold", "manifest")


def _coerce(key: str, value: object) -> object:
    if key == "threshold":
        return float(value)
    if key in ("dim", "hash_seed", "window", "synthetic_mentions", "synthetic_clusters"):
        return int(value)
    if key == "lenient":
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("1", "true", "yes", "on")
    return value


class Config:
    """Layered run configuration with reproducible resolution order."""

    def __init__(self, args: argparse.Namespace):
        self._flags = vars(args)
        self._file: dict = {}
        config_path = self._flags.get("config")
        if config_path:
            with open(config_path, encoding="utf-8") as fh:
                doc = json.load(fh)
            self._file = doc.get("effective_config", doc)

    def get(self, key: str, default: object = None) -> object:
        flag = self._flags.get(key)
        if flag is not None and flag is not False:
            return flag
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            return _coerce(key, env)
        if key in self._file and self._file[key] is not None:
            return _coerce(key, self._file[key])
        if key in DEFAULTS:
            return DEFAULTS[key]
        return default

    def require(self, key: str, parser: argparse.ArgumentParser) -> object:
        value = self.get(key)
        if value is None:
            parser.error(f"missing required option --{key.replace('_', '-')}")
        return value

    def path(self, key: str, parser: argparse.ArgumentParser) -> Path:
        value = Path(str(self.require(key, parser)))
        if not value.exists():
            parser.error(f"--{key.replace('_', '-')}: path '{value}' does not exist")
        return value

    def effective(self, keys: list[str]) -> dict:
        out = {}
        for key in keys:
            value = self.get(key)
            if isinstance(value, Path):
                value = str(value)
            out[key] = value
        return out


def _provider(config: Config, parser: argparse.ArgumentParser):
    kind = str(config.get("provider"))
    dim = int(config.get("dim"))
    hash_seed = int(config.get("hash_seed"))
    if kind in ("hashed", "hashed_baseline"):
        return HashedTextProvider(dimension=dim, hash_seed=hash_seed)
    if kind in ("external", "external_vectors"):
        return ExternalVectorProvider(dimension=dim)
    parser.error(f"--provider must be 'hashed' or 'external', got '{kind}'")


def _load_corpus(config: Config, parser: argparse.ArgumentParser, ontology) -> list[Document]:
    corpus_path = config.path("corpus", parser)
    lenient = bool(config.get("lenient"))
    topics = set(ontology.topic_sets) if ontology is not None else None
    with open(corpus_path, encoding="utf-8") as fh:
        return list(parse_corpus(fh, known_topics=topics, lenient=lenient))


def _out_dir(config: Config, parser: argparse.ArgumentParser) -> Path:
    out = Path(str(config.require("out", parser)))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_mentions(mentions_by_doc: dict, destination: Path) -> int:
    count = 0
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id, mentions in mentions_by_doc.items():
            for m in mentions:
                record = {
                    "doc_id": m.doc_id,
                    "mention_id": m.mention_id,
                    "span": list(m.span),
                    "surface": m.surface,
                    "head": m.head,
                    "coarse_type": m.coarse_type,
                }
                if m.kb_key is not None:
                    record["kb_key"] = m.kb_key
                if m.vector is not None:
                    record["vector"] = [float(x) for x in m.vector]
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                count += 1
    return count


def cmd_extract(config: Config, parser: argparse.ArgumentParser) -> int:
    ontology = load_ontology(config.path("ontology", parser))
    gazetteer = load_gazetteer(config.path("gazetteer", parser))
    documents = _load_corpus(config, parser, ontology)
    window = int(config.get("window"))
    out = _out_dir(config, parser)
    mentions_by_doc = {
        doc.doc_id: detect_mentions(doc, gazetteer, window=window) for doc in documents
    }
    count = _write_mentions(mentions_by_doc, out / "mentions.jsonl")
    logger.info("extracted %d mentions from %d documents", count, len(documents))
    return 0


def _resolve_mentions(config: Config, parser: argparse.ArgumentParser, documents, window: int):
    mentions_arg = config.get("mentions")
    lenient = bool(config.get("lenient"))
    if mentions_arg is not None:
        if str(mentions_arg) == "-":
            return load_mentions(sys.stdin, documents, window=window, lenient=lenient)
        path = Path(str(mentions_arg))
        if not path.exists():
            parser.error(f"--mentions: path '{path}' does not exist")
        return load_mentions(path, documents, window=window, lenient=lenient)
    if config.get("gazetteer") is not None:
        gazetteer = load_gazetteer(config.path("gazetteer", parser))
        return {doc.doc_id: detect_mentions(doc, gazetteer, window=window) for doc in documents}
    parser.error("cluster needs mention input: pass --mentions FILE|- or --gazetteer FILE")


def cmd_cluster(config: Config, parser: argparse.ArgumentParser) -> int:
    threshold = float(config.get("threshold"))
    if not (-1.0 <= threshold <= 1.0):
        parser.error(f"--threshold must lie in [-1, 1], got {threshold}")
    ontology = load_ontology(config.path("ontology", parser))
    provider = _provider(config, parser)
    documents = _load_corpus(config, parser, ontology)
    window = int(config.get("window"))
    mentions_by_doc = _resolve_mentions(config, parser, documents, window)
    seeds = load_seed_table(config.path("seeds", parser))
    kb = load_kb(config.path("kb", parser)) if config.get("kb") is not None else None
    out = _out_dir(config, parser)

    result = run(documents, mentions_by_doc, seeds, threshold, provider, ontology, kb=kb)
    write_stakeholder_table(result.table, out / "stakeholders.jsonl")
    write_cluster_dump(result.state, out / "clusters.jsonl")
    manifest = dict(result.manifest)
    manifest["effective_config"] = config.effective(
        ["ontology", "corpus", "gazetteer", "kb", "seeds", "mentions",
         "threshold", "dim", "hash_seed", "provider", "window", "lenient"]
    )
    write_manifest(manifest, out / "manifest.json")
    logger.info(
        "clustered %d mentions into %d clusters (%d similarity ops)",
        result.manifest["mention_count"],
        result.manifest["cluster_count"],
        result.manifest["similarity_op_count"],
    )
    return 0


def _read_stakeholder_records(path: Path) -> dict[str, list[dict]]:
    by_doc: dict[str, list[dict]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                record = json.loads(line)
                by_doc.setdefault(record["doc_id"], []).append(record)
    return by_doc


def cmd_coverage(config: Config, parser: argparse.ArgumentParser) -> int:
    from .clustering import DecisionKind, StakeholderEntry

    ontology = load_ontology(config.path("ontology", parser))
    documents = _load_corpus(config, parser, ontology)
    records = _read_stakeholder_records(config.path("stakeholders", parser))
    out = _out_dir(config, parser)

    matrix = CoverageMatrix()
    for doc in documents:
        fragment = [
            StakeholderEntry(
                surface=r["surface"],
                label=r["label"],
                mention_id=r["mention_id"],
                cluster_id=r["cluster_id"],
                decision=DecisionKind(r["decision"]),
                score=r.get("score"),
                nearest_cluster_id=r.get("nearest_cluster_id"),
                span=(0, 0),
            )
            for r in records.get(doc.doc_id, [])
        ]
        accumulate(matrix, doc, fragment)
    written = export_by_topic(matrix, ontology, out)
    logger.info("wrote %d coverage files to %s", len(written), out)
    return 0


def cmd_eval(config: Config, parser: argparse.ArgumentParser) -> int:
    ontology = load_ontology(config.path("ontology", parser))
    documents = _load_corpus(config, parser, ontology)
    records = _read_stakeholder_records(config.path("stakeholders", parser))
    window = int(config.get("window"))
    mentions_by_doc = load_mentions(
        config.path("mentions", parser), documents, window=window
    )
    gold = load_gold(config.path("gold", parser), ontology)
    out = _out_dir(config, parser)

    span_of = {
        (doc_id, m.mention_id): m.span
        for doc_id, mentions in mentions_by_doc.items()
        for m in mentions
    }
    predictions = []
    for doc_id, doc_records in records.items():
        for record in doc_records:
            key = (doc_id, record["mention_id"])
            if key not in span_of:
                parser.error(
                    f"stakeholder record {key} has no matching mention record; "
                    f"pass the mention file the clusterer consumed"
                )
            predictions.append(
                Prediction(doc_id=doc_id, span=span_of[key], label=record["label"])
            )
    report = score(predictions, gold)
    with open(out / "metrics.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    with open(out / "metrics.csv", "w", encoding="utf-8", newline="\n") as fh:
        for row in report.to_table_rows():
            fh.write(",".join(row) + "\n")
    logger.info("macro-F %.4f over %d gold spans", report.macro_f, len(gold))
    return 0


def cmd_bench(config: Config, parser: argparse.ArgumentParser) -> int:
    report: dict = {}
    synthetic_mentions = config.get("synthetic_mentions")
    if synthetic_mentions is not None:
        n_clusters = int(config.get("synthetic_clusters") or 20)
        stream = make_synthetic_stream(
            n_mentions=int(synthetic_mentions),
            n_clusters=n_clusters,
            dim=int(config.get("dim")),
            rng_seed=int(config.get("hash_seed")),
        )
        from .ontology import default_ontology

        provider = ExternalVectorProvider(dimension=int(config.get("dim")))
        threshold = float(config.get("threshold"))
        result = run(
            stream.documents,
            stream.mentions_by_doc,
            stream.seeds,
            threshold,
            provider,
            default_ontology(),
        )
        report["sequential"] = complexity_report(result.manifest)
        if bool(config.get("pairwise")):
            flat_mentions = [
                m for doc in stream.documents for m in stream.mentions_by_doc[doc.doc_id]
            ]
            flat_embeddings = [m.vector for m in flat_mentions]
            baseline = run_pairwise_baseline(
                flat_mentions, flat_embeddings, threshold, stream.seeds
            )
            sequential_assignment = _sequential_assignment(result, stream)
            report["pairwise"] = {
                "op_count": baseline.op_count,
                "component_count": len(baseline.components),
                "unlabeled_components": baseline.unlabeled_count,
                "agreement_with_sequential": pairwise_agreement(
                    sequential_assignment, baseline.assignment
                ),
            }
    elif config.get("manifest") is not None:
        with open(config.path("manifest", parser), encoding="utf-8") as fh:
            manifest = json.load(fh)
        report["sequential"] = complexity_report(manifest)
    else:
        parser.error("bench needs --manifest FILE or --synthetic-mentions N")

    out_arg = config.get("out")
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_arg is not None:
        out = _out_dir(config, parser)
        (out / "bench.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _sequential_assignment(result, stream) -> list[int]:
    assignment = []
    for doc in stream.documents:
        for entry in result.table.fragment(doc.doc_id):
            assignment.append(entry.cluster_id)
    return assignment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stakeflow",
        description="Stakeholder extraction, sequential clustering, and coverage analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (a run manifest also works)")
        p.add_argument("--ontology", help="ontology JSON file")
        p.add_argument("--corpus", help="document JSONL file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--lenient", action="store_true", default=None,
                       help="skip malformed input lines instead of aborting")
        p.add_argument("--window", type=int, help="context window characters per side")

    p_extract = sub.add_parser("extract", help="detect mentions with the gazetteer baseline")
    add_common(p_extract)
    p_extract.add_argument("--gazetteer", help="gazetteer JSONL file")

    p_cluster = sub.add_parser("cluster", help="run sequential cross-document clustering")
    add_common(p_cluster)
    p_cluster.add_argument("--gazetteer", help="gazetteer JSONL (detect mentions inline)")
    p_cluster.add_argument("--mentions", help="mention JSONL file, or - for stdin")
    p_cluster.add_argument("--seeds", help="seed cluster JSONL file")
    p_cluster.add_argument("--kb", help="knowledge base JSONL file")
    p_cluster.add_argument("--threshold", type=float, help="similarity threshold in [-1, 1]")
    p_cluster.add_argument("--dim", type=int, help="embedding dimension")
    p_cluster.add_argument("--hash-seed", dest="hash_seed", type=int, help="hashing seed")
    p_cluster.add_argument("--provider", choices=["hashed", "external"], help="embedding backend")

    p_coverage = sub.add_parser("coverage", help="aggregate visibility per (topic, house, type)")
    add_common(p_coverage)
    p_coverage.add_argument("--stakeholders", help="stakeholder table JSONL from cluster")

    p_eval = sub.add_parser("eval", help="score stakeholder table against gold annotations")
    add_common(p_eval)
    p_eval.add_argument("--stakeholders", help="stakeholder table JSONL from cluster")
    p_eval.add_argument("--mentions", help="mention JSONL the clusterer consumed")
    p_eval.add_argument("--gold", help="gold annotation JSONL file")

    p_bench = sub.add_parser("bench", help="verify the similarity-op budget of a run")
    add_common(p_bench)
    p_bench.add_argument("--manifest", help="manifest.json of a finished cluster run")
    p_bench.add_argument("--synthetic-mentions", dest="synthetic_mentions", type=int,
                         help="generate a synthetic stream with this many mentions")
    p_bench.add_argument("--synthetic-clusters", dest="synthetic_clusters", type=int,
                         help="planted cluster count for the synthetic stream")
    p_bench.add_argument("--threshold", type=float, help="similarity threshold in [-1, 1]")
    p_bench.add_argument("--dim", type=int, help="embedding dimension")
    p_bench.add_argument("--hash-seed", dest="hash_seed", type=int, help="stream RNG seed")
    p_bench.add_argument("--pairwise", action="store_true", default=None,
                         help="also run the all-pairs baseline for comparison")
    return parser


COMMANDS = {
    "extract": cmd_extract,
    "cluster": cmd_cluster,
    "coverage": cmd_coverage,
    "eval": cmd_eval,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    config = Config(args)
    try:
        return COMMANDS[args.command](config, parser)
    except StakeflowError as exc:
        print(f"stakeflow {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
