"""Stratified pair sampling and document-level accuracy over judge labels.

Judge labels are produced externally (humans or LLMs reading the sampled
pairs file); this module selects what they read and aggregates what they
answered. A document counts as good only if every one of its sampled
pairs was labeled correct: any error marks the whole document bad.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus_io import BilingualPairRecord, RecordError, _dump, _iter_lines, _open_auto

logger = logging.getLogger(__name__)


class PoolTooSmall(ValueError):
    pass


class NoLabels(ValueError):
    pass


class MissingGroundTruth(ValueError):
    pass


@dataclass
class SampleSpec:
    """Selection parameters: 100 longest + 100 shortest + 1,800 uniform.

    Pairs whose English side has fewer than ``min_chars`` characters AND
    fewer than ``min_words`` words are discarded before selection.
    """

    min_chars: int = 32
    min_words: int = 5
    n_longest: int = 100
    n_shortest: int = 100
    n_uniform: int = 1800
    seed: int = 0

    def __post_init__(self):
        if self.n_longest + self.n_shortest + self.n_uniform != 2000:
            raise ValueError("strata must total exactly 2000 pairs")

    @property
    def total(self) -> int:
        return self.n_longest + self.n_shortest + self.n_uniform


def passes_length_filter(record: BilingualPairRecord, spec: SampleSpec) -> bool:
    """Keep unless the English side is short in characters AND in words."""
    text = record.en_text
    return len(text) >= spec.min_chars or len(text.split()) >= spec.min_words


def sample_pairs(
    pairs: Iterable[BilingualPairRecord], spec: SampleSpec
) -> list[BilingualPairRecord]:
    """Deterministic stratified selection of exactly ``spec.total`` pairs.

    Length strata rank by English character count with ties broken by pair
    id; the uniform stratum draws without replacement from the remainder
    with a generator seeded from ``spec.seed``. The three strata are
    disjoint and returned concatenated: longest, shortest, uniform.
    """
    pool = [p for p in pairs if passes_length_filter(p, spec)]
    if len(pool) < spec.total:
        raise PoolTooSmall(f"{len(pool)} pairs survive filtering, need {spec.total}")

    longest = sorted(pool, key=lambda p: (-len(p.en_text), p.pair_id))[: spec.n_longest]
    chosen = {p.pair_id for p in longest}
    rest = [p for p in pool if p.pair_id not in chosen]

    shortest = sorted(rest, key=lambda p: (len(p.en_text), p.pair_id))[: spec.n_shortest]
    chosen.update(p.pair_id for p in shortest)
    rest = [p for p in rest if p.pair_id not in chosen]

    rest.sort(key=lambda p: p.pair_id)
    uniform = random.Random(spec.seed).sample(rest, spec.n_uniform)
    return longest + shortest + uniform


@dataclass(frozen=True)
class LabeledPair:
    """One judge verdict: (pair, model) -> correctly aligned or not."""

    symbol: str
    pair_id: str
    model: str
    verdict: bool


def document_accuracy(labels: Sequence[LabeledPair], model: str) -> float:
    """Fraction of documents whose sampled pairs the model all labeled True."""
    mine = [lab for lab in labels if lab.model == model]
    if not mine:
        raise NoLabels(f"no labels for model {model!r}")
    ok: dict[str, bool] = {}
    for lab in mine:
        ok[lab.symbol] = ok.get(lab.symbol, True) and lab.verdict
    return sum(ok.values()) / len(ok)


def confusion_counts(
    labels: Sequence[LabeledPair], ground_truth: Mapping[str, bool]
) -> tuple[int, int]:
    """(false positives, false negatives) of model labels against the truth."""
    fp = fn = 0
    for lab in labels:
        if lab.pair_id not in ground_truth:
            raise MissingGroundTruth(f"no ground truth for pair {lab.pair_id}")
        truth = ground_truth[lab.pair_id]
        if lab.verdict and not truth:
            fp += 1
        elif not lab.verdict and truth:
            fn += 1
    return fp, fn


def read_labels(path, on_error: str = "raise"):
    for line_no, obj in _iter_lines(path, on_error):
        try:
            yield LabeledPair(
                obj["symbol"], obj["pair_id"], obj["model"], bool(obj["verdict"])
            )
        except (KeyError, TypeError) as exc:
            err = RecordError(path, line_no, f"bad label record: {exc!r}")
            if on_error == "raise":
                raise err from exc
            logger.warning("skipping record: %s", err)


def write_labels(labels: Iterable[LabeledPair], path) -> None:
    with _open_auto(path, "w") as fh:
        for lab in labels:
            fh.write(
                _dump(
                    {
                        "symbol": lab.symbol,
                        "pair_id": lab.pair_id,
                        "model": lab.model,
                        "verdict": lab.verdict,
                    }
                )
                + "\n"
            )
