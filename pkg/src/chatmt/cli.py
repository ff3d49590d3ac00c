"""Command-line entry points: ingest, summarize, translate, evaluate,
ablate, serve.

Exit codes: 0 success, 1 validation/input error, 2 backend failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backend import BackendConfig, HttpBackend
from .context import SummaryCache, cached_summarizer, HistoryEntry
from .corpus import assemble_conversations, flatten, read_jsonl, split_stats, write_jsonl
from .errors import BackendError, ChatmtError
from .metrics import bleu, chrf, corpus_report
from .pipeline import RunConfig, VARIANTS, filter_direction, format_table, run_ablation, run_batch
from .synthetic import (
    bilingual_mock_backend,
    context_mock_backend,
    echo_mock_backend,
    load_bundled_corpus,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BACKEND = 2


def make_backend(spec: str, config: BackendConfig):
    """Build a backend from a CLI spec: "http", "mock:echo" or "mock:ctx"."""
    if spec == "http":
        return HttpBackend(config)
    if spec == "mock:echo":
        return echo_mock_backend()
    if spec == "mock:ctx":
        return context_mock_backend()
    if spec == "mock:bilingual":
        return bilingual_mock_backend()
    raise ValueError(
        f"unknown backend spec {spec!r} (use http, mock:echo, mock:ctx or mock:bilingual)"
    )


def _parse_direction(text: str) -> tuple[str, str]:
    parts = text.split("-")
    if len(parts) != 2:
        raise ValueError(f"direction must look like ko-en, got {text!r}")
    return (parts[0], parts[1])


def _load_conversations(path: str):
    return assemble_conversations(list(read_jsonl(path)))


def cmd_ingest(args: argparse.Namespace) -> int:
    conversations = _load_conversations(args.input)
    stats = split_stats(conversations, args.split)
    directions = ",".join(f"{k}:{v}" for k, v in sorted(stats.direction_counts.items()))
    print(
        f"split={stats.split_name} records={stats.record_count} "
        f"conversations={stats.conversation_count} directions={directions}"
    )
    if args.output:
        write_jsonl(args.output, flatten(conversations))
        print(f"wrote {args.output}")
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace) -> int:
    conversations = _load_conversations(args.input)
    backend = make_backend(args.backend, _backend_config(args))
    cache = SummaryCache(args.cache)
    total = 0
    for conversation in conversations:
        summarize = cached_summarizer(backend, cache, conversation.doc_id)
        for index in range(3, len(conversation.turns) + 1):
            prefix = [
                HistoryEntry(original=t.source, sender=t.sender)
                for t in conversation.turns[: index - 2]
            ]
            summarize(prefix)
            total += 1
    print(f"cached {total} summaries in {args.cache}")
    return EXIT_OK


def cmd_translate(args: argparse.Namespace) -> int:
    conversations = _load_conversations(args.input)
    if args.direction:
        conversations = filter_direction(conversations, _parse_direction(args.direction))
    config = RunConfig(
        output_dir=Path(args.output_dir),
        variant=args.variant,
        backend=_backend_config(args),
        summary_mode=args.summary_mode,
        teacher_forced=not args.self_forced,
        resume=args.resume,
        cache_path=Path(args.cache) if args.cache else None,
    )
    backend = make_backend(args.backend, config.backend)
    artifacts = run_batch(conversations, config, backend)
    print(f"translated {len(artifacts.rows)} rows -> {artifacts.translations_path}")
    if artifacts.report is not None:
        corpus = artifacts.report.corpus
        print(f"corpus BLEU {corpus['bleu']:.2f} chrF {corpus['chrf']:.2f}")
    return EXIT_OK


def _read_texts(path: str) -> list[str]:
    """Hypothesis/reference texts from a JSONL file: the `translation` field
    when it is a string, otherwise `reference`."""
    texts = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            row = json.loads(line)
            value = row.get("translation")
            if not isinstance(value, str):
                value = row.get("reference")
            texts.append(value if isinstance(value, str) else "")
    return texts


def cmd_evaluate(args: argparse.Namespace) -> int:
    if bool(args.hyp) != bool(args.ref):
        raise ValueError("--hyp and --ref go together")
    if not args.hyp and not args.input:
        raise ValueError("provide --hyp/--ref or --input")
    if args.hyp and args.ref:
        hyps = _read_texts(args.hyp)
        refs = _read_texts(args.ref)
        print(f"corpus BLEU {bleu(hyps, refs):.2f}")
        print(f"corpus chrF {chrf(hyps, refs):.2f}")
        return EXIT_OK
    # Single dataset file with both translation and reference columns.
    conversations = _load_conversations(args.input)
    translations = {}
    for conversation in conversations:
        for turn in conversation.turns:
            translations[(conversation.doc_id, turn.turn_index)] = turn.extra.get(
                "translation", ""
            )
    report = corpus_report(conversations, translations)
    print(json.dumps(report.to_json(), ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    if args.input:
        conversations = _load_conversations(args.input)
    else:
        conversations = load_bundled_corpus()
    variants = args.variants.split(",") if args.variants else list(VARIANTS)
    directions = (
        [_parse_direction(d) for d in args.directions.split(",")] if args.directions else None
    )
    config = RunConfig(output_dir=Path(args.output_dir), backend=_backend_config(args))
    backend = make_backend(args.backend, config.backend)
    table = run_ablation(conversations, config, backend, variants, directions)
    text = format_table(table)
    print(text)
    (Path(args.output_dir) / "table.txt").write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app
    from .service import SessionStore

    backend = make_backend(args.backend, _backend_config(args))
    store = SessionStore(args.data_dir, backend, summary_mode=args.summary_mode)
    app = create_app(store, console_dir=args.console)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _backend_config(args: argparse.Namespace) -> BackendConfig:
    kwargs = {}
    if getattr(args, "endpoint", None):
        kwargs["endpoint"] = args.endpoint
    if getattr(args, "model", None):
        kwargs["model_name"] = args.model
    if getattr(args, "parallelism", None):
        kwargs["parallelism"] = args.parallelism
    return BackendConfig(**kwargs)


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", default="mock:echo",
                        help="http, mock:echo, mock:ctx or mock:bilingual (default: mock:echo)")
    parser.add_argument("--endpoint", help="chat-completion URL for --backend http")
    parser.add_argument("--model", help="model name sent on the wire")
    parser.add_argument("--parallelism", type=int, help="max in-flight requests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chatmt",
                                     description="Context-aware chat translation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a JSONL split and print stats")
    p.add_argument("--input", required=True)
    p.add_argument("--split", default="unnamed")
    p.add_argument("--output", help="write normalized rows (adds turn_index)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", help="precompute the summary cache")
    p.add_argument("--input", required=True)
    p.add_argument("--cache", required=True, help="summary cache JSONL path")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("translate", help="batch-translate a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--variant", default="with_context", choices=VARIANTS)
    p.add_argument("--direction", help="filter rows, e.g. ko-en")
    p.add_argument("--summary-mode", default="per_prefix",
                   choices=("per_prefix", "incremental"))
    p.add_argument("--self-forced", action="store_true",
                   help="use own outputs (not references) as history translations")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--cache", help="summary cache JSONL path")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="score hypotheses against references")
    p.add_argument("--hyp", help="hypothesis JSONL (uses translation, else reference)")
    p.add_argument("--ref", help="reference JSONL")
    p.add_argument("--input", help="dataset JSONL carrying its own translation field")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run the context ablation table")
    p.add_argument("--input", help="dataset JSONL (default: bundled synthetic corpus)")
    p.add_argument("--output-dir", default="ablation_out")
    p.add_argument("--variants", help="comma-separated subset of " + ",".join(VARIANTS))
    p.add_argument("--directions", help="comma-separated, e.g. en-ko,ko-en")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="run the live-session HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--data-dir", default="sessions")
    p.add_argument("--summary-mode", default="incremental",
                   choices=("incremental", "per_prefix"))
    p.add_argument("--console", help="static console directory to mount at /")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (ChatmtError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
