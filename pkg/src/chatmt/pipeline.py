"""Batch translation runner and the context-ablation harness.

Binds corpus -> context -> prompting -> backend -> metrics. Three run
variants are supported: the full context treatment, a context-free control,
and a minimal-instruction control (context kept, instruction stripped).
History is teacher-forced by default: prior turns are paired with their
reference translations when available so every run sees the same context.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .backend import BackendConfig, guarded_translate
from .context import (
    ContextBundle,
    HistoryEntry,
    Summary,
    SummaryCache,
    cached_summarizer,
    update_summary_incremental,
)
from .corpus import Conversation
from .errors import BackendError, NoReferences, UnsupportedDirection
from .metrics import MetricReport, corpus_report, format_metrics_row
from .prompting import SUPPORTED_DIRECTIONS, Direction, build_prompt

VARIANTS = ("with_context", "without_context", "without_prompt_modification")


@dataclass
class RunConfig:
    output_dir: Path
    variant: str = "with_context"
    direction: Direction | None = None  # None: translate every row as-is
    backend: BackendConfig = field(default_factory=BackendConfig)
    summary_mode: str = "per_prefix"  # per_prefix | incremental
    teacher_forced: bool = True
    resume: bool = False
    domain_note: str | None = None
    cache_path: Path | None = None

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.summary_mode not in ("per_prefix", "incremental"):
            raise ValueError("summary_mode must be per_prefix or incremental")


@dataclass
class RunArtifacts:
    translations_path: Path
    manifest: dict
    report: MetricReport | None
    rows: list[dict]


def filter_direction(
    conversations: Sequence[Conversation], direction: Direction
) -> list[Conversation]:
    """Keep only the turns translated in ``direction`` (conversation structure
    preserved, turn_index untouched)."""
    if tuple(direction) not in SUPPORTED_DIRECTIONS:
        raise UnsupportedDirection(f"direction {direction!r} not supported")
    kept = []
    for conversation in conversations:
        turns = [turn for turn in conversation.turns if turn.direction == tuple(direction)]
        if turns:
            kept.append(Conversation(doc_id=conversation.doc_id, turns=turns))
    return kept


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _translate_conversation(
    conversation: Conversation,
    config: RunConfig,
    backend,
    cache: SummaryCache,
    done: dict[tuple[str, int], dict],
) -> list[dict]:
    rows: list[dict] = []
    prior_translations: dict[int, str] = {}
    rolling = Summary(text="", covered_turns=0)
    summarizer = cached_summarizer(backend, cache, conversation.doc_id)

    for index, turn in enumerate(conversation.turns):
        if tuple(turn.direction) not in SUPPORTED_DIRECTIONS:
            raise UnsupportedDirection(f"row {conversation.doc_id}/{index}: {turn.direction}")

        def entry(i: int) -> HistoryEntry:
            prior = conversation.turns[i]
            return HistoryEntry(
                original=prior.source, sender=prior.sender,
                translation=prior_translations.get(i),
            )

        summary_failed = False
        if config.variant == "without_context":
            bundle = ContextBundle()
        else:
            window_start = max(0, index - 2)
            history = [entry(i) for i in range(window_start, index)]
            summary = None
            if window_start > 0:
                try:
                    if config.summary_mode == "incremental":
                        while rolling.covered_turns < window_start:
                            rolling = update_summary_incremental(
                                rolling, entry(rolling.covered_turns), backend
                            )
                        summary = rolling
                    else:
                        summary = summarizer([entry(i) for i in range(window_start)])
                except BackendError:
                    summary_failed = True
            bundle = ContextBundle(history=history, summary=summary,
                                   summary_failed=summary_failed)

        key = (conversation.doc_id, index)
        if key in done:
            row = done[key]
        else:
            package, messages = build_prompt(
                bundle,
                turn.direction,
                turn.source,
                minimal=config.variant == "without_prompt_modification",
                domain_note=config.domain_note,
            )
            guarded = guarded_translate(backend, messages, expected_target=turn.target_language)
            row = {
                "doc_id": conversation.doc_id,
                "turn_index": index,
                "source_language": turn.source_language,
                "target_language": turn.target_language,
                "sender": turn.sender,
                "source": turn.source,
                "reference": turn.reference,
                "translation": guarded.result.text,
                "language_label": guarded.guess.label,
                "mismatched": guarded.mismatched,
                "generations": guarded.generations,
                "instruction": package.instruction,
                "user_message": messages[1]["content"],
            }
        rows.append(row)

        if config.teacher_forced and turn.reference is not None:
            prior_translations[index] = turn.reference
        else:
            prior_translations[index] = row["translation"]
    return rows


def run_batch(
    conversations: Sequence[Conversation], config: RunConfig, backend
) -> RunArtifacts:
    """Translate every row of the dataset under the configured variant.

    Conversations run concurrently (bounded by backend parallelism); turns
    within a conversation are strictly sequential. Output files are written
    atomically; on a backend failure the completed rows are persisted and the
    manifest is flagged incomplete before the error propagates.
    """
    if not conversations:
        raise ValueError("dataset must be non-empty")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    translations_path = config.output_dir / "translations.jsonl"
    started_at = time.time()

    done: dict[tuple[str, int], dict] = {}
    if config.resume and translations_path.exists():
        with translations_path.open("r", encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    row = json.loads(line)
                    done[(row["doc_id"], row["turn_index"])] = row

    cache = SummaryCache(config.cache_path)
    results: list[list[dict] | None] = [None] * len(conversations)
    failure: BackendError | None = None
    with ThreadPoolExecutor(max_workers=config.backend.parallelism) as pool:
        futures = {
            pool.submit(_translate_conversation, conv, config, backend, cache, done): slot
            for slot, conv in enumerate(conversations)
        }
        for future, slot in futures.items():
            try:
                results[slot] = future.result()
            except BackendError as exc:
                failure = exc

    rows = [row for chunk in results if chunk is not None for row in chunk]

    def manifest(complete: bool, error: str | None = None) -> dict:
        doc = {
            "version": __version__,
            "variant": config.variant,
            "direction": "-".join(config.direction) if config.direction else None,
            "summary_mode": config.summary_mode,
            "teacher_forced": config.teacher_forced,
            "model": config.backend.model_name,
            "started_at": started_at,
            "finished_at": time.time(),
            "row_count": len(rows),
            "complete": complete,
        }
        if error:
            doc["error"] = error
        return doc

    lines = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
    _atomic_write(translations_path, lines)

    if failure is not None:
        _atomic_write(
            config.output_dir / "manifest.json",
            json.dumps(manifest(False, str(failure)), indent=2),
        )
        raise failure

    translations = {(row["doc_id"], row["turn_index"]): row["translation"] for row in rows}
    try:
        report = corpus_report(conversations, translations)
    except NoReferences:
        report = None
    if report is not None:
        _atomic_write(
            config.output_dir / "report.json",
            json.dumps(report.to_json(), ensure_ascii=False, indent=2),
        )
        _atomic_write(
            config.output_dir / "table.txt",
            format_table([{"label": config.variant, "corpus": report.corpus}]) + "\n",
        )
    manifest_doc = manifest(True)
    _atomic_write(config.output_dir / "manifest.json", json.dumps(manifest_doc, indent=2))
    return RunArtifacts(
        translations_path=translations_path, manifest=manifest_doc, report=report, rows=rows
    )


# --- ablation -------------------------------------------------------------------

def run_ablation(
    conversations: Sequence[Conversation],
    base_config: RunConfig,
    backend,
    variants: Sequence[str] = VARIANTS,
    directions: Sequence[Direction] | None = None,
) -> list[dict]:
    """Run each variant x direction cell and collect corpus metrics.

    Directions default to those present in the dataset. Each cell's artifacts
    land under ``output_dir/<variant>_<direction>/``.
    """
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
    if directions is None:
        seen: list[Direction] = []
        for conversation in conversations:
            for turn in conversation.turns:
                if turn.direction not in seen:
                    seen.append(turn.direction)
        directions = seen

    table: list[dict] = []
    for variant in variants:
        for direction in directions:
            subset = filter_direction(conversations, direction)
            if not subset:
                continue
            cell_dir = base_config.output_dir / f"{variant}_{direction[0]}-{direction[1]}"
            cell_config = RunConfig(
                output_dir=cell_dir,
                variant=variant,
                direction=tuple(direction),
                backend=base_config.backend,
                summary_mode=base_config.summary_mode,
                teacher_forced=base_config.teacher_forced,
                domain_note=base_config.domain_note,
                cache_path=base_config.cache_path,
            )
            artifacts = run_batch(subset, cell_config, backend)
            corpus = artifacts.report.corpus if artifacts.report else {"bleu": 0.0, "chrf": 0.0}
            table.append(
                {
                    "variant": variant,
                    "direction": f"{direction[0]}-{direction[1]}",
                    "comet": "ext",
                    "chrf": corpus["chrf"],
                    "bleu": corpus["bleu"],
                    "c_comet_qe": "-",
                }
            )
    return table


def format_table(rows: Sequence[dict]) -> str:
    """Aligned text table: one row per run, COMET columns external-only."""
    header = f"{'Configuration':<44} {'COMET':>8} {'chrF':>8} {'BLEU':>8} {'C-COMET-QE':>12}"
    lines = [header, "-" * len(header)]
    for row in rows:
        if "corpus" in row:
            lines.append(format_metrics_row(row["label"], row["corpus"]))
        else:
            label = f"{row['variant']} ({row['direction']})"
            lines.append(
                f"{label:<44} {row['comet']:>8} {row['chrf']:>8.2f} "
                f"{row['bleu']:>8.2f} {row['c_comet_qe']:>12}"
            )
    return "\n".join(lines)
