"""Naive reference scorers used to cross-check the real metric code.

Deliberately slow and literal: n-grams are materialized as lists, clipping
is done by counting occurrences one n-gram at a time, and nothing is shared
with the implementations under test.
"""

from __future__ import annotations

import math


def ngram_list(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def oracle_bleu(hyp_token_lists, ref_token_lists, max_order=4):
    """Corpus BLEU by exhaustive counting, 0-100.

    Orders with no hypothesis n-grams anywhere in the corpus are left out of
    the geometric mean; a zero precision on a populated order zeroes the
    score (no smoothing).
    """
    log_sum = 0.0
    used_orders = 0
    for n in range(1, max_order + 1):
        clipped = 0
        total = 0
        for hyp, ref in zip(hyp_token_lists, ref_token_lists):
            hyp_ngrams = ngram_list(hyp, n)
            ref_ngrams = ngram_list(ref, n)
            total += len(hyp_ngrams)
            for gram in set(hyp_ngrams):
                clipped += min(hyp_ngrams.count(gram), ref_ngrams.count(gram))
        if total == 0:
            continue
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
        used_orders += 1
    if used_orders == 0:
        return 0.0
    c = sum(len(h) for h in hyp_token_lists)
    r = sum(len(g) for g in ref_token_lists)
    if c == 0:
        return 0.0
    bp = min(1.0, math.exp(1.0 - r / c))
    return 100.0 * bp * math.exp(log_sum / used_orders)


def oracle_chrf(hyps, refs, max_order=6, beta=2.0, remove_whitespace=True):
    """Corpus chrF by exhaustive character n-gram counting, 0-100.

    Precision/recall are averaged over orders where both sides have at least
    one n-gram (corpus-wide), then combined with the F-beta formula.
    """
    if remove_whitespace:
        hyps = ["".join(h.split()) for h in hyps]
        refs = ["".join(r.split()) for r in refs]
    precisions = []
    recalls = []
    for n in range(1, max_order + 1):
        overlap = 0
        hyp_total = 0
        ref_total = 0
        for hyp, ref in zip(hyps, refs):
            hyp_ngrams = ngram_list(list(hyp), n)
            ref_ngrams = ngram_list(list(ref), n)
            hyp_total += len(hyp_ngrams)
            ref_total += len(ref_ngrams)
            for gram in set(hyp_ngrams):
                overlap += min(hyp_ngrams.count(gram), ref_ngrams.count(gram))
        if hyp_total > 0 and ref_total > 0:
            precisions.append(overlap / hyp_total)
            recalls.append(overlap / ref_total)
    if not precisions:
        return 0.0
    p = sum(precisions) / len(precisions)
    r = sum(recalls) / len(recalls)
    if p + r == 0.0:
        return 0.0
    b2 = beta * beta
    return 100.0 * (1 + b2) * p * r / (b2 * p + r)
