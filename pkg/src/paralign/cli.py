"""Batch pipeline driver.

Subcommands expose each stage (flatten, align, blocks, stats, sample,
score, bench-lcs) and a directory-scale run (batch-align). Every
subcommand writes byte-identical output for identical inputs and flags.

Configuration precedence for shared settings: command-line flag, then
environment variable (UPRPRC_ prefix), then JSON config file given with
--config, then the built-in default.

Exit codes: 0 success, 1 partial failures, 2 usage error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import logging
import os
import shlex
import statistics
import sys
from pathlib import Path

from . import bench, corpus_io, evaluation
from .gapa import DEFAULT_DROP_THRESHOLD, align_documents
from .tables import FlattenDiverged, flatten_recursive
from .textnorm import Document
from .translate import (
    DictionaryTranslator,
    ExternalProcessTranslator,
    IdentityTranslator,
    translate_document,
)

logger = logging.getLogger(__name__)

ENV_PREFIX = "UPRPRC_"
DEFAULT_CACHE_DIR = ".paralign-cache"


class UsageError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return loaded


def resolve_setting(name: str, flag_value, config: dict, default, cast=str):
    """flag > UPRPRC_<NAME> environment variable > config file > default."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        return cast(env)
    if name in config:
        return cast(config[name])
    return default


def make_translator(spec: str, cache_dir: str):
    if spec == "identity":
        return IdentityTranslator()
    if spec.startswith("dict:"):
        path = spec[len("dict:") :]
        with open(path, encoding="utf-8") as fh:
            mapping = json.load(fh)
        return DictionaryTranslator(mapping)
    if spec == "dict":
        raise UsageError("dictionary translator needs a mapping file: dict:<path>")
    if spec.startswith("external:"):
        command = shlex.split(spec[len("external:") :])
        if not command:
            raise UsageError("external translator needs a command: external:<cmd>")
        return ExternalProcessTranslator(command, cache_dir)
    raise UsageError(f"unknown translator {spec!r}")


def _align_one(
    src_path: str,
    tgt_path: str,
    symbol: str,
    lang: str,
    h_c: float,
    translator_spec: str,
    cache_dir: str,
    out_path: str | None,
):
    """Align one document pair; returns (records, summary)."""
    src_doc = Document.from_text(symbol, lang, Path(src_path).read_text(encoding="utf-8"))
    tgt_doc = Document.from_text(symbol, "en", Path(tgt_path).read_text(encoding="utf-8"))
    translator = make_translator(translator_spec, cache_dir)
    translated = translate_document(src_doc, translator)
    result = align_documents(translated, tgt_doc, h_c)
    records = corpus_io.bilingual_records(
        result,
        symbol,
        lang,
        [p.text for p in src_doc.paragraphs],
        [p.text for p in tgt_doc.paragraphs],
    )
    rates = [g.min_hit_rate for g in result.groups]
    summary = {
        "symbol": symbol,
        "lang": lang,
        "groups": len(result.groups),
        "dropped_src": len(result.dropped_src),
        "dropped_tgt": len(result.dropped_tgt),
        "mean_hit_rate": statistics.mean(rates) if rates else 0.0,
    }
    if out_path is not None:
        corpus_io.write_bilingual(records, out_path)
    return records, summary


def _input_digest(*paths: str, extra: str = "") -> str:
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
        h.update(b"\x00")
    h.update(extra.encode("utf-8"))
    return h.hexdigest()


def _batch_task(task: dict):
    """Worker for batch-align: skips work when the input digest matches."""
    out_path = Path(task["out_path"])
    meta_path = out_path.with_name(out_path.name + ".meta.json")
    digest = _input_digest(
        task["src_path"],
        task["tgt_path"],
        extra=f"h_c={task['h_c']};translator={task['translator']}",
    )
    if out_path.exists() and meta_path.exists():
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            meta = {}
        if meta.get("input_digest") == digest:
            return {"symbol": task["symbol"], "lang": task["lang"], "skipped": True}
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _, summary = _align_one(
        task["src_path"],
        task["tgt_path"],
        task["symbol"],
        task["lang"],
        task["h_c"],
        task["translator"],
        task["cache_dir"],
        str(out_path),
    )
    meta_path.write_text(
        json.dumps({"input_digest": digest}, sort_keys=True) + "\n", encoding="utf-8"
    )
    summary["skipped"] = False
    return summary


def cmd_flatten(args, config) -> int:
    in_path = Path(args.input)
    out_path = Path(args.output)
    if in_path.is_dir():
        pairs = [
            (p, out_path / p.relative_to(in_path))
            for p in sorted(in_path.rglob("*"))
            if p.is_file()
        ]
    else:
        pairs = [(in_path, out_path)]
    failures = 0
    for src, dst in pairs:
        try:
            flat = flatten_recursive(src.read_text(encoding="utf-8"))
        except (FlattenDiverged, UnicodeDecodeError) as exc:
            print(f"flatten failed: {src}: {exc}", file=sys.stderr)
            failures += 1
            continue
        dst.parent.mkdir(parents=True, exist_ok=True)
        dst.write_text(flat, encoding="utf-8")
    return 1 if failures else 0


def cmd_align(args, config) -> int:
    h_c = resolve_setting("drop_threshold", args.drop_threshold, config,
                          DEFAULT_DROP_THRESHOLD, float)
    translator = resolve_setting("translator", args.translator, config, "identity")
    cache_dir = resolve_setting("cache_dir", args.cache_dir, config, DEFAULT_CACHE_DIR)
    symbol = args.symbol or Path(args.src_file).stem
    records, summary = _align_one(
        args.src_file, args.tgt_file, symbol, args.lang, h_c, translator,
        cache_dir, args.out,
    )
    if args.out is None:
        for rec in records:
            sys.stdout.write(corpus_io._dump(corpus_io._pair_obj(rec)) + "\n")
    print(
        f"{summary['symbol']} {summary['lang']}: groups={summary['groups']} "
        f"dropped_src={summary['dropped_src']} dropped_tgt={summary['dropped_tgt']} "
        f"mean_hit_rate={summary['mean_hit_rate']:.3f}",
        file=sys.stderr,
    )
    return 0


def cmd_batch_align(args, config) -> int:
    h_c = resolve_setting("drop_threshold", args.drop_threshold, config,
                          DEFAULT_DROP_THRESHOLD, float)
    translator = resolve_setting("translator", args.translator, config, "identity")
    cache_dir = resolve_setting("cache_dir", args.cache_dir, config, DEFAULT_CACHE_DIR)
    jobs = resolve_setting("jobs", args.jobs, config, 1, int)
    corpus = Path(args.corpus_dir)
    out_dir = Path(args.out_dir)
    langs = [lang.strip() for lang in args.langs.split(",") if lang.strip()]

    tasks = []
    for symbol_dir in sorted(p for p in corpus.iterdir() if p.is_dir()):
        en_file = symbol_dir / "en.txt"
        if not en_file.exists():
            print(f"skipping {symbol_dir.name}: no en.txt", file=sys.stderr)
            continue
        for lang in langs:
            src_file = symbol_dir / f"{lang}.txt"
            if not src_file.exists():
                continue
            tasks.append(
                {
                    "symbol": symbol_dir.name,
                    "lang": lang,
                    "src_path": str(src_file),
                    "tgt_path": str(en_file),
                    "out_path": str(out_dir / symbol_dir.name / f"{lang}2en.jsonl"),
                    "h_c": h_c,
                    "translator": translator,
                    "cache_dir": cache_dir,
                }
            )

    failures = 0
    done = 0
    skipped = 0
    if jobs <= 1:
        outcomes = []
        for task in tasks:
            try:
                outcomes.append(_batch_task(task))
            except Exception as exc:
                print(f"align failed: {task['symbol']}/{task['lang']}: {exc}",
                      file=sys.stderr)
                failures += 1
    else:
        outcomes = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_batch_task, task): task for task in tasks}
            for fut in concurrent.futures.as_completed(futures):
                task = futures[fut]
                try:
                    outcomes.append(fut.result())
                except Exception as exc:
                    print(f"align failed: {task['symbol']}/{task['lang']}: {exc}",
                          file=sys.stderr)
                    failures += 1
    for outcome in outcomes:
        done += 1
        if outcome.get("skipped"):
            skipped += 1
    print(f"batch-align: {done} pairs ({skipped} up to date), {failures} failed",
          file=sys.stderr)
    return 1 if failures else 0


def cmd_blocks(args, config) -> int:
    bilingual_dir = Path(args.bilingual_dir)
    corpus_dir = Path(args.corpus_dir)
    blocks = []
    failures = 0
    for symbol_dir in sorted(p for p in bilingual_dir.iterdir() if p.is_dir()):
        symbol = symbol_dir.name
        per_lang = {}
        for path in sorted(symbol_dir.glob("*2en.jsonl")):
            lang = path.name[: -len("2en.jsonl")]
            per_lang[lang] = list(corpus_io.read_bilingual(path))
        if not per_lang:
            continue
        en_file = corpus_dir / symbol / "en.txt"
        if not en_file.exists():
            print(f"blocks: {symbol}: no en.txt in corpus dir", file=sys.stderr)
            failures += 1
            continue
        en_doc = Document.from_text(symbol, "en", en_file.read_text(encoding="utf-8"))
        blocks.extend(
            corpus_io.aggregate_blocks(
                symbol, per_lang, [p.text for p in en_doc.paragraphs]
            )
        )
    corpus_io.write_blocks(blocks, args.out)
    print(f"blocks: wrote {len(blocks)} blocks", file=sys.stderr)
    return 1 if failures else 0


def cmd_stats(args, config) -> int:
    stats = corpus_io.corpus_stats(
        corpus_io.read_file_level(args.corpus, on_error=args.on_error)
    )
    print(f"{'lang':<6}{'files':>12}{'tokens':>16}")
    for lang in corpus_io.LANG_KEYS:
        print(f"{lang:<6}{stats.files[lang]:>12}{stats.tokens[lang]:>16}")
    if args.out:
        Path(args.out).write_text(
            json.dumps({"files": stats.files, "tokens": stats.tokens},
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_sample(args, config) -> int:
    seed = resolve_setting("seed", args.seed, config, 0, int)
    pairs = []
    for path in args.pairs:
        pairs.extend(corpus_io.read_bilingual(path))
    spec = evaluation.SampleSpec(seed=seed)
    selected = evaluation.sample_pairs(pairs, spec)
    corpus_io.write_bilingual(selected, args.out)
    print(f"sample: wrote {len(selected)} pairs", file=sys.stderr)
    return 0


def cmd_score(args, config) -> int:
    labels = list(evaluation.read_labels(args.labels))
    models = sorted({lab.model for lab in labels})
    if args.model:
        models = [m for m in models if m == args.model]
        if not models:
            raise UsageError(f"no labels for model {args.model!r}")
    results = {}
    print(f"{'model':<12}{'documents':>10}{'accuracy':>10}")
    for model in models:
        mine = [lab for lab in labels if lab.model == model]
        acc = evaluation.document_accuracy(mine, model)
        docs = len({lab.symbol for lab in mine})
        results[model] = {"documents": docs, "accuracy": acc}
        print(f"{model:<12}{docs:>10}{acc:>10.3f}")
    if args.truth:
        truth = {}
        for lab in evaluation.read_labels(args.truth):
            truth[lab.pair_id] = lab.verdict
        print(f"{'model':<12}{'false_pos':>10}{'false_neg':>10}")
        for model in models:
            mine = [lab for lab in labels if lab.model == model]
            fp, fn = evaluation.confusion_counts(mine, truth)
            results[model]["false_pos"] = fp
            results[model]["false_neg"] = fn
            print(f"{model:<12}{fp:>10}{fn:>10}")
    if args.out:
        Path(args.out).write_text(
            json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def cmd_bench_lcs(args, config) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench.run_benchmark(sizes, trials=args.trials, seed=args.seed,
                               include_oracle=not args.no_oracle)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paralign",
        description="paragraph-level bilingual document alignment pipeline",
    )
    parser.add_argument("--config", help="JSON config file for shared settings")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flatten", help="flatten plain-text tables per file")
    p.add_argument("input", help="input file or directory")
    p.add_argument("output", help="output file or directory")
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("align", help="align one document pair")
    p.add_argument("src_file")
    p.add_argument("tgt_file")
    p.add_argument("--lang", required=True, help="source language code")
    p.add_argument("--symbol", help="record symbol (default: source file stem)")
    p.add_argument("--drop-threshold", type=float, dest="drop_threshold",
                   help=f"hit-rate cutoff (default {DEFAULT_DROP_THRESHOLD})")
    p.add_argument("--translator",
                   help="identity | dict:<path> | external:<cmd> (default identity)")
    p.add_argument("--cache-dir", dest="cache_dir",
                   help="translation cache directory")
    p.add_argument("--out", help="output records file (default: stdout)")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("batch-align", help="align every symbol/language pair")
    p.add_argument("corpus_dir", help="directory of <symbol>/<lang>.txt files")
    p.add_argument("--langs", required=True, help="comma-separated language codes")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--jobs", type=int, help="concurrent workers (default 1)")
    p.add_argument("--drop-threshold", type=float, dest="drop_threshold")
    p.add_argument("--translator")
    p.add_argument("--cache-dir", dest="cache_dir")
    p.set_defaults(func=cmd_batch_align)

    p = sub.add_parser("blocks", help="aggregate bilingual outputs into blocks")
    p.add_argument("bilingual_dir", help="batch-align output directory")
    p.add_argument("--corpus-dir", required=True, dest="corpus_dir",
                   help="corpus directory holding en.txt per symbol")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("stats", help="per-language file and token counts")
    p.add_argument("corpus", help="file-level records path")
    p.add_argument("--out", help="also write counts as JSON")
    p.add_argument("--on-error", choices=("raise", "skip"), default="raise",
                   dest="on_error")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sample", help="stratified 2000-pair sample for judging")
    p.add_argument("pairs", nargs="+", help="bilingual records files")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("score", help="document accuracy from judge labels")
    p.add_argument("labels", help="label records file")
    p.add_argument("--model", help="restrict to one model")
    p.add_argument("--truth", help="ground-truth label file for confusion counts")
    p.add_argument("--out", help="also write results as JSON")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench-lcs", help="time the LCS kernels, emit CSV")
    p.add_argument("--sizes", default="12500,25000,50000,100000")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-oracle", action="store_true", dest="no_oracle")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_lcs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
