"""From-scratch MT metrics: corpus BLEU, corpus chrF, sentence/document
aggregation, and simplified discourse taggers (Korean formality markers,
cross-turn lexical cohesion) scored as precision/recall/F1.

BLEU defaults to order 4 with whitespace tokens for English targets and
character tokens for Korean (no reliable whitespace segmentation); chrF to
order 6, beta 2, whitespace excluded. Everything here is pure arithmetic on
the inputs; neural metrics are only ever attached from an external scorer.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Conversation
from .errors import EmptyCorpus, LengthMismatch, NoReferences

TOKENIZER_WHITESPACE = "whitespace"
TOKENIZER_CHAR = "char"


@dataclass
class BleuConfig:
    max_ngram_order: int = 4
    smoothing: str = "none"  # none | add_one_on_zero
    tokenizer: str = TOKENIZER_WHITESPACE

    def __post_init__(self) -> None:
        if self.max_ngram_order < 1:
            raise ValueError("max_ngram_order must be >= 1")
        if self.smoothing not in ("none", "add_one_on_zero"):
            raise ValueError(f"unknown smoothing {self.smoothing!r}")
        if self.tokenizer not in (TOKENIZER_WHITESPACE, TOKENIZER_CHAR):
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")


@dataclass
class ChrfConfig:
    max_char_order: int = 6
    beta: float = 2.0
    include_whitespace: bool = False

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class TagSpan:
    turn_index: int
    token_index: int
    phenomenon: str  # formality | lexical_cohesion
    value: str


@dataclass
class PRF:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricReport:
    per_sentence: list[dict]
    corpus: dict
    per_document: dict[str, dict]
    tagger: dict[str, PRF]
    row_keys: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus,
            "per_document": self.per_document,
            "per_sentence": self.per_sentence,
            "tagger": {
                name: {"precision": prf.precision, "recall": prf.recall, "f1": prf.f1}
                for name, prf in self.tagger.items()
            },
        }


def tokenize(text: str, tokenizer: str) -> list[str]:
    if tokenizer == TOKENIZER_WHITESPACE:
        return text.split()
    if tokenizer == TOKENIZER_CHAR:
        return [ch for ch in text if not ch.isspace()]
    raise ValueError(f"unknown tokenizer {tokenizer!r}")


def default_tokenizer_for(target_language: str) -> str:
    return TOKENIZER_CHAR if target_language == "ko" else TOKENIZER_WHITESPACE


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _check_streams(hypotheses: Sequence[str], references: Sequence[str]) -> None:
    if len(hypotheses) != len(references):
        raise LengthMismatch(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    if not hypotheses:
        raise EmptyCorpus("no segments to score")


def bleu_from_tokens(
    hyp_token_lists: Sequence[Sequence[str]],
    ref_token_lists: Sequence[Sequence[str]],
    config: BleuConfig,
) -> float:
    """Corpus BLEU over pre-tokenized segments, 0-100.

    Geometric mean of clipped modified n-gram precisions with uniform weights,
    times the brevity penalty min(1, exp(1 - r/c)). Orders with no hypothesis
    n-grams anywhere in the corpus are excluded from the mean; under smoothing
    "none" a zero precision on a populated order zeroes the score.
    """
    hyp_len = sum(len(tokens) for tokens in hyp_token_lists)
    ref_len = sum(len(tokens) for tokens in ref_token_lists)
    if hyp_len == 0:
        return 0.0

    log_sum = 0.0
    used_orders = 0
    for n in range(1, config.max_ngram_order + 1):
        clipped = 0
        total = 0
        for hyp, ref in zip(hyp_token_lists, ref_token_lists):
            hyp_counts = _ngram_counts(hyp, n)
            total += sum(hyp_counts.values())
            clipped += sum((hyp_counts & _ngram_counts(ref, n)).values())
        if total == 0:
            continue
        if clipped == 0:
            if config.smoothing == "none":
                return 0.0
            precision = 1.0 / (total + 1)
        else:
            precision = clipped / total
        log_sum += math.log(precision)
        used_orders += 1
    if used_orders == 0:
        return 0.0
    brevity_penalty = min(1.0, math.exp(1.0 - ref_len / hyp_len))
    return 100.0 * brevity_penalty * math.exp(log_sum / used_orders)


def bleu(
    hypotheses: Sequence[str],
    references: Sequence[str],
    config: BleuConfig | None = None,
) -> float:
    config = config or BleuConfig()
    _check_streams(hypotheses, references)
    return bleu_from_tokens(
        [tokenize(h, config.tokenizer) for h in hypotheses],
        [tokenize(r, config.tokenizer) for r in references],
        config,
    )


_WHITESPACE = re.compile(r"\s+")


def chrf(
    hypotheses: Sequence[str],
    references: Sequence[str],
    config: ChrfConfig | None = None,
) -> float:
    """Corpus chrF, 0-100: character n-gram precision and recall averaged
    over orders 1..max_char_order (counting only orders populated on both
    sides), combined as F-beta."""
    config = config or ChrfConfig()
    _check_streams(hypotheses, references)
    if not config.include_whitespace:
        hypotheses = [_WHITESPACE.sub("", h) for h in hypotheses]
        references = [_WHITESPACE.sub("", r) for r in references]

    precision_sum = recall_sum = 0.0
    effective_orders = 0
    for n in range(1, config.max_char_order + 1):
        overlap = hyp_total = ref_total = 0
        for hyp, ref in zip(hypotheses, references):
            hyp_counts = _ngram_counts(hyp, n)
            ref_counts = _ngram_counts(ref, n)
            hyp_total += sum(hyp_counts.values())
            ref_total += sum(ref_counts.values())
            overlap += sum((hyp_counts & ref_counts).values())
        if hyp_total > 0 and ref_total > 0:
            precision_sum += overlap / hyp_total
            recall_sum += overlap / ref_total
            effective_orders += 1
    if effective_orders == 0:
        return 0.0
    precision = precision_sum / effective_orders
    recall = recall_sum / effective_orders
    if precision + recall == 0.0:
        return 0.0
    beta_sq = config.beta * config.beta
    return 100.0 * (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)


def f1(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall on the 0-100 scale."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


# --- simplified discourse taggers ----------------------------------------------

# Sentence-final honorific endings, longest match first. The -(스)ㅂ endings
# surface either as the full syllable block (습니다/습니까) or as a ㅂ coda on
# the preceding syllable (갑니다), handled separately below.
_FORMAL_ENDINGS = ("습니다", "습니까", "십시오", "세요", "어요", "아요")
_INFORMAL_ENDINGS = ("어", "아", "다", "야")
_TRAILING_PUNCT = ".?!…\"'’”)»]"

FORMAL = "formal"
INFORMAL = "informal"


def _final_consonant_is_bieup(syllable: str) -> bool:
    code = ord(syllable)
    if not 0xAC00 <= code <= 0xD7A3:
        return False
    return (code - 0xAC00) % 28 == 17  # ㅂ coda


def _classify_ending(word: str) -> str | None:
    for ending in _FORMAL_ENDINGS:
        if word.endswith(ending):
            return FORMAL
    # -ㅂ니다 / -ㅂ니까 with the ㅂ fused into the preceding syllable.
    for ending in ("니다", "니까"):
        if word.endswith(ending) and len(word) > len(ending):
            if _final_consonant_is_bieup(word[-len(ending) - 1]):
                return FORMAL
    for ending in _INFORMAL_ENDINGS:
        if word.endswith(ending):
            return INFORMAL
    return None


def tag_formality_ko(sentence: str, turn_index: int = 0) -> list[TagSpan]:
    """Tag clause-final honorific markers in Korean text.

    A token is clause-final when it ends the sentence or carries sentence
    punctuation; its ending is matched against a fixed marker table and
    labelled formal or informal.
    """
    spans: list[TagSpan] = []
    tokens = sentence.split()
    for token_index, token in enumerate(tokens):
        clause_final = token_index == len(tokens) - 1 or token[-1] in _TRAILING_PUNCT
        if not clause_final:
            continue
        word = token.rstrip(_TRAILING_PUNCT)
        if not word:
            continue
        value = _classify_ending(word)
        if value is not None:
            spans.append(TagSpan(turn_index, token_index, "formality", value))
    return spans


_STOPWORDS = frozenset(
    """a an the and or but if then else of to in on at by for with from as is are was
    were be been being am do does did not no yes it its this that these those i you
    he she we they them his her our your my me us so too very can could will would
    should may might must have has had there here what when where which who whom
    why how""".split()
)
_TOKEN_EDGE = re.compile(r"^\W+|\W+$", re.UNICODE)


def _content_words(sentence: str) -> list[tuple[int, str]]:
    words = []
    for token_index, token in enumerate(sentence.split()):
        word = _TOKEN_EDGE.sub("", token).lower()
        if len(word) >= 2 and word not in _STOPWORDS and not word.isdigit():
            words.append((token_index, word))
    return words


def tag_lexical_cohesion(document: Sequence[tuple[str, str]]) -> list[TagSpan]:
    """Tag source content words that recur across turns of one document.

    A content word (length >= 2, not a stopword) whose first occurrence is in
    an earlier turn yields a cohesion span at every occurrence in later turns.
    """
    first_turn: dict[str, int] = {}
    spans: list[TagSpan] = []
    for turn_index, (source, _target) in enumerate(document):
        for token_index, word in _content_words(source):
            seen_at = first_turn.setdefault(word, turn_index)
            if turn_index > seen_at:
                spans.append(TagSpan(turn_index, token_index, "lexical_cohesion", word))
    return spans


def prf_against_reference(
    hyp_tags: Sequence[TagSpan], ref_tags: Sequence[TagSpan]
) -> PRF:
    """Precision/recall/F1 of hypothesis tags against reference tags; a match
    is an identical (turn_index, phenomenon, value) triple, with multiplicity."""
    hyp_counts = Counter((t.turn_index, t.phenomenon, t.value) for t in hyp_tags)
    ref_counts = Counter((t.turn_index, t.phenomenon, t.value) for t in ref_tags)
    matched = sum((hyp_counts & ref_counts).values())
    precision = 100.0 * matched / len(hyp_tags) if hyp_tags else 0.0
    recall = 100.0 * matched / len(ref_tags) if ref_tags else 0.0
    return PRF(precision=precision, recall=recall, f1=f1(precision, recall))


# --- corpus-level report --------------------------------------------------------

_SENTENCE_BLEU = "add_one_on_zero"  # single rows rarely share a 4-gram


def corpus_report(
    conversations: Sequence[Conversation],
    translations: Mapping[tuple[str, int], str],
    bleu_config: BleuConfig | None = None,
    chrf_config: ChrfConfig | None = None,
) -> MetricReport:
    """Score translations against the dataset references.

    Rows without a reference are skipped. Sentence scores use add-one-smoothed
    BLEU; corpus and per-document scores use the (unsmoothed) corpus configs.
    Tagger P/R/F1 compares tags from the hypotheses against tags produced from
    the references by the same taggers.
    """
    chrf_config = chrf_config or ChrfConfig()
    rows: list[tuple[str, int, str, str, str, str]] = []
    for conversation in conversations:
        for turn in conversation.turns:
            if turn.reference is None:
                continue
            hyp = translations.get((conversation.doc_id, turn.turn_index), "")
            rows.append(
                (conversation.doc_id, turn.turn_index, turn.source, hyp,
                 turn.reference, turn.target_language)
            )
    if not rows:
        raise NoReferences("no dataset row carries a reference translation")

    def row_tokens(row) -> tuple[list[str], list[str]]:
        tokenizer = bleu_config.tokenizer if bleu_config else default_tokenizer_for(row[5])
        return tokenize(row[3], tokenizer), tokenize(row[4], tokenizer)

    corpus_bleu_config = bleu_config or BleuConfig()
    sentence_bleu_config = BleuConfig(
        max_ngram_order=corpus_bleu_config.max_ngram_order,
        smoothing=_SENTENCE_BLEU,
        tokenizer=corpus_bleu_config.tokenizer,
    )

    per_sentence = []
    for row in rows:
        hyp_tokens, ref_tokens = row_tokens(row)
        per_sentence.append(
            {
                "bleu": bleu_from_tokens([hyp_tokens], [ref_tokens], sentence_bleu_config),
                "chrf": chrf([row[3]], [row[4]], chrf_config),
            }
        )

    def aggregate(subset) -> dict:
        token_pairs = [row_tokens(row) for row in subset]
        return {
            "bleu": bleu_from_tokens(
                [pair[0] for pair in token_pairs],
                [pair[1] for pair in token_pairs],
                corpus_bleu_config,
            ),
            "chrf": chrf([row[3] for row in subset], [row[4] for row in subset], chrf_config),
        }

    doc_ids = []
    for row in rows:
        if row[0] not in doc_ids:
            doc_ids.append(row[0])
    per_document = {
        doc_id: aggregate([row for row in rows if row[0] == doc_id]) for doc_id in doc_ids
    }

    hyp_formality: list[TagSpan] = []
    ref_formality: list[TagSpan] = []
    hyp_cohesion: list[TagSpan] = []
    ref_cohesion: list[TagSpan] = []
    for doc_position, doc_id in enumerate(doc_ids):
        doc_rows = [row for row in rows if row[0] == doc_id]
        # Offset turn indices per document so tags never collide across docs.
        offset = doc_position * 10_000

        def shift(spans: list[TagSpan]) -> list[TagSpan]:
            return [
                TagSpan(offset + s.turn_index, s.token_index, s.phenomenon, s.value)
                for s in spans
            ]

        for row in doc_rows:
            if row[5] == "ko":
                hyp_formality.extend(tag_formality_ko(row[3], offset + row[1]))
                ref_formality.extend(tag_formality_ko(row[4], offset + row[1]))
        hyp_cohesion.extend(shift(tag_lexical_cohesion([(row[2], row[3]) for row in doc_rows])))
        ref_cohesion.extend(shift(tag_lexical_cohesion([(row[2], row[4]) for row in doc_rows])))

    return MetricReport(
        per_sentence=per_sentence,
        corpus=aggregate(rows),
        per_document=per_document,
        tagger={
            "formality": prf_against_reference(hyp_formality, ref_formality),
            "lexical_cohesion": prf_against_reference(hyp_cohesion, ref_cohesion),
        },
        row_keys=[(row[0], row[1]) for row in rows],
    )


def format_metrics_row(
    label: str, report_corpus: dict, comet: str = "ext", c_comet_qe: str = "-"
) -> str:
    return (
        f"{label:<44} {comet:>8} {report_corpus['chrf']:>8.2f} "
        f"{report_corpus['bleu']:>8.2f} {c_comet_qe:>12}"
    )
