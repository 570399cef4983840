"""Adapter command line: ``enrich`` documents and ``build-kb`` from wiki pages.

The adapter talks to the engine only through its wire formats; typical use
pipes straight in:

    stakeflow-adapter enrich --documents docs.jsonl --out - \
      | stakeflow cluster --mentions - ...
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .enrich import EnrichConfig, EnrichmentError, enrich_documents, read_documents, write_mentions
from .ner import ModelLoadError
from .srl import extract_triplets
from .wiki import FetchError, PageCache, fetch_page

logger = logging.getLogger(__name__)


def cmd_enrich(args: argparse.Namespace) -> int:
    config = EnrichConfig(
        backend=args.backend,
        model_path=args.model,
        kb_cache=args.kb_cache,
        emit_vectors=args.emit_vectors,
        dim=args.dim,
        hash_seed=args.hash_seed,
        window=args.window,
        lenient=args.lenient,
    )
    records = enrich_documents(read_documents(args.documents), config)
    if args.out == "-":
        count = write_mentions(records, sys.stdout)
    else:
        count = write_mentions(records, args.out)
    logger.info("wrote %d mention records", count)
    return 0


def cmd_build_kb(args: argparse.Namespace) -> int:
    cache = PageCache(args.cache)
    if args.pages:
        titles = list(args.pages)
    elif args.page_list:
        with open(args.page_list, encoding="utf-8") as fh:
            titles = [line.strip() for line in fh if line.strip()]
    else:
        titles = [page.title for page in cache.all_pages()]

    descriptions = 0
    triplets = 0
    failures = 0
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="\n")
    try:
        for title in titles:
            try:
                page = fetch_page(title, cache, online=args.online)
            except FetchError as exc:
                failures += 1
                logger.warning("skipped: %s", exc)
                continue
            out.write(
                json.dumps(
                    {"kb_key": page.key, "description": page.extract}, ensure_ascii=False
                )
                + "\n"
            )
            descriptions += 1
            for s, p, o in extract_triplets(page.extract):
                out.write(json.dumps({"triplet": [s, p, o]}, ensure_ascii=False) + "\n")
                triplets += 1
    finally:
        if out is not sys.stdout:
            out.close()
    logger.info(
        "kb built: %d descriptions, %d triplets, %d pages skipped",
        descriptions, triplets, failures,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stakeflow-adapter",
        description="NER / SRL / wiki enrichment sidecar emitting engine wire-format records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enrich = sub.add_parser("enrich", help="detect entities and emit mention JSONL")
    p_enrich.add_argument("--documents", required=True, help="document JSONL file")
    p_enrich.add_argument("--out", default="-", help="output path, or - for stdout")
    p_enrich.add_argument("--backend", choices=["rules", "transformers"], default="rules")
    p_enrich.add_argument("--model", help="local model path for the transformers backend")
    p_enrich.add_argument("--kb-cache", dest="kb_cache", help="wiki page cache directory")
    p_enrich.add_argument("--emit-vectors", dest="emit_vectors", action="store_true")
    p_enrich.add_argument("--dim", type=int, default=256,
                          help="vector dimension; must match the engine's --dim")
    p_enrich.add_argument("--hash-seed", dest="hash_seed", type=int, default=0)
    p_enrich.add_argument("--window", type=int, default=200)
    p_enrich.add_argument("--lenient", action="store_true",
                          help="skip documents that fail extraction, with a report")

    p_kb = sub.add_parser("build-kb", help="emit KB JSONL from cached/fetched wiki pages")
    p_kb.add_argument("--cache", required=True, help="wiki page cache directory")
    p_kb.add_argument("--out", default="-", help="output path, or - for stdout")
    p_kb.add_argument("--pages", nargs="*", help="page titles")
    p_kb.add_argument("--page-list", dest="page_list", help="file with one title per line")
    p_kb.add_argument("--online", action="store_true",
                      help="allow network fetches for uncached pages")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "enrich":
            return cmd_enrich(args)
        return cmd_build_kb(args)
    except (EnrichmentError, ModelLoadError, FetchError, OSError) as exc:
        print(f"stakeflow-adapter {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
