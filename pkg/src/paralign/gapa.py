"""Graph-aided paragraph alignment.

The LCS between a machine-translated source document and its English
counterpart induces links between paragraphs: each matched word connects
the paragraph holding its source occurrence with the paragraph holding its
target occurrence, weighted by the word's letter count. Paragraphs whose
matched-letter share (hit rate) falls below a threshold are discarded
together with their links; connected components of the surviving bipartite
graph become M-N alignment groups over contiguous index ranges.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lcs import FlatToken, MatchPair, flatten_document, lcs_hunt_szymanski
from .textnorm import Document, Paragraph

logger = logging.getLogger(__name__)

# Hit-rate cutoff used when none is given; 0.3 is the recommended operating
# point, exposed to configuration as DROP_THRESHOLD.
DEFAULT_DROP_THRESHOLD = 0.3

# One group swallowing most of a document usually signals noise-driven
# interval repair; it is allowed but surfaced as a diagnostic.
_WIDE_GROUP_SHARE = 0.5


class EmptyDocument(ValueError):
    """Raised when either side of an alignment has no paragraphs."""


@dataclass(frozen=True, slots=True)
class ParaLink:
    src_para: int
    tgt_para: int
    letter_weight: int


@dataclass
class HitRates:
    src: list[float]
    tgt: list[float]


@dataclass
class AlignmentGroup:
    """One M-N correspondence between contiguous paragraph ranges.

    Ranges are inclusive index intervals. Members list the surviving
    paragraphs inside the range (a dropped paragraph may sit inside the
    interval without being a member). Hit rates are the per-side minima
    over members.
    """

    src_range: tuple[int, int]
    tgt_range: tuple[int, int]
    src_members: list[int]
    tgt_members: list[int]
    hit_rate_src: float
    hit_rate_tgt: float
    src_text: str
    tgt_text: str

    @property
    def min_hit_rate(self) -> float:
        return min(self.hit_rate_src, self.hit_rate_tgt)


@dataclass
class AlignmentResult:
    groups: list[AlignmentGroup]
    dropped_src: list[int]
    dropped_tgt: list[int]
    hit_rates: HitRates
    h_c: float
    diagnostics: list[str] = field(default_factory=list)


def build_links(
    matches: Iterable[MatchPair],
    src_tokens: Sequence[FlatToken],
    tgt_tokens: Sequence[FlatToken],
) -> list[ParaLink]:
    """Aggregate matched words into per-(src, tgt) paragraph links.

    Every match contributes its word's letter count to exactly one link;
    matches landing on the same paragraph pair accumulate.
    """
    weights: dict[tuple[int, int], int] = {}
    for pair in matches:
        s = src_tokens[pair.src_pos]
        t = tgt_tokens[pair.tgt_pos]
        key = (s.para_index, t.para_index)
        weights[key] = weights.get(key, 0) + s.letters
    return [ParaLink(i, j, w) for (i, j), w in sorted(weights.items())]


def hit_rate(para: Paragraph, matched_letters: int) -> float:
    """Matched letters over total letters; zero-letter paragraphs rate 0."""
    total = para.letter_total
    if total == 0:
        return 0.0
    return matched_letters / total


def compute_hit_rates(
    matches: Iterable[MatchPair],
    src_tokens: Sequence[FlatToken],
    tgt_tokens: Sequence[FlatToken],
    src_doc: Document,
    tgt_doc: Document,
) -> HitRates:
    src_letters = [0] * len(src_doc.paragraphs)
    tgt_letters = [0] * len(tgt_doc.paragraphs)
    for pair in matches:
        s = src_tokens[pair.src_pos]
        t = tgt_tokens[pair.tgt_pos]
        src_letters[s.para_index] += s.letters
        tgt_letters[t.para_index] += t.letters
    return HitRates(
        [hit_rate(p, src_letters[p.index]) for p in src_doc.paragraphs],
        [hit_rate(p, tgt_letters[p.index]) for p in tgt_doc.paragraphs],
    )


def filter_nodes(
    links: Sequence[ParaLink], rates: HitRates, h_c: float
) -> tuple[list[ParaLink], list[int], list[int]]:
    """Drop paragraphs rating strictly below h_c, removing incident links.

    The comparison is strict, so h_c = 0.0 removes nothing.
    """
    dropped_src = [i for i, h in enumerate(rates.src) if h < h_c]
    dropped_tgt = [j for j, h in enumerate(rates.tgt) if h < h_c]
    bad_src = set(dropped_src)
    bad_tgt = set(dropped_tgt)
    kept = [
        link
        for link in links
        if link.src_para not in bad_src and link.tgt_para not in bad_tgt
    ]
    return kept, dropped_src, dropped_tgt


class _UnionFind:
    def __init__(self):
        self.parent: dict[object, object] = {}

    def find(self, node):
        root = node
        while root in self.parent:
            root = self.parent[root]
        while node in self.parent:
            self.parent[node], node = root, self.parent[node]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def connected_components(links: Sequence[ParaLink]) -> list[tuple[list[int], list[int]]]:
    """Components of the bipartite paragraph graph, ordered by first source index.

    Only linked paragraphs participate; an isolated paragraph forms no
    component.
    """
    uf = _UnionFind()
    nodes = set()
    for link in links:
        a = ("s", link.src_para)
        b = ("t", link.tgt_para)
        nodes.add(a)
        nodes.add(b)
        uf.union(a, b)
    comps: dict[object, tuple[list[int], list[int]]] = {}
    for node in sorted(nodes):
        side, idx = node
        comp = comps.setdefault(uf.find(node), ([], []))
        comp[0 if side == "s" else 1].append(idx)
    out = [(sorted(s), sorted(t)) for s, t in comps.values()]
    out.sort(key=lambda c: (c[0], c[1]))
    return out


def canonicalize_groups(
    components: Sequence[tuple[list[int], list[int]]],
    m: int,
    n: int,
    excluded_src: Iterable[int] = (),
    excluded_tgt: Iterable[int] = (),
) -> list[dict]:
    """Repair components into disjoint, ordered interval groups.

    Components whose index intervals overlap or cross are merged until the
    groups are pairwise disjoint and strictly ordered on both sides. Linkless
    paragraphs strictly inside a group's interval are absorbed into it,
    except those in the excluded sets (paragraphs removed by filtering).

    Returns group shells: dicts with src/tgt ranges and member lists.
    """
    shells = [
        {
            "src_min": min(s),
            "src_max": max(s),
            "tgt_min": min(t),
            "tgt_max": max(t),
            "src_members": set(s),
            "tgt_members": set(t),
        }
        for s, t in components
        if s and t
    ]
    changed = True
    while changed:
        changed = False
        shells.sort(key=lambda g: (g["src_min"], g["tgt_min"]))
        merged: list[dict] = []
        for shell in shells:
            if merged:
                prev = merged[-1]
                overlaps = (
                    shell["src_min"] <= prev["src_max"]
                    or shell["tgt_min"] <= prev["tgt_max"]
                )
                if overlaps:
                    prev["src_min"] = min(prev["src_min"], shell["src_min"])
                    prev["src_max"] = max(prev["src_max"], shell["src_max"])
                    prev["tgt_min"] = min(prev["tgt_min"], shell["tgt_min"])
                    prev["tgt_max"] = max(prev["tgt_max"], shell["tgt_max"])
                    prev["src_members"] |= shell["src_members"]
                    prev["tgt_members"] |= shell["tgt_members"]
                    changed = True
                    continue
            merged.append(shell)
        shells = merged

    linked_src = set().union(*(g["src_members"] for g in shells)) if shells else set()
    linked_tgt = set().union(*(g["tgt_members"] for g in shells)) if shells else set()
    absorb_src = set(range(m)) - linked_src - set(excluded_src)
    absorb_tgt = set(range(n)) - linked_tgt - set(excluded_tgt)
    for shell in shells:
        for i in list(absorb_src):
            if shell["src_min"] < i < shell["src_max"]:
                shell["src_members"].add(i)
                absorb_src.discard(i)
        for j in list(absorb_tgt):
            if shell["tgt_min"] < j < shell["tgt_max"]:
                shell["tgt_members"].add(j)
                absorb_tgt.discard(j)
    return shells


def align_documents(
    src_doc: Document, tgt_doc: Document, h_c: float = DEFAULT_DROP_THRESHOLD
) -> AlignmentResult:
    """Full alignment of a translated source document against its target.

    The source must already be machine-translated to the target language,
    one translated paragraph per original paragraph. Deterministic for
    fixed inputs.
    """
    if not src_doc.paragraphs or not tgt_doc.paragraphs:
        raise EmptyDocument(
            f"cannot align {src_doc.symbol}: "
            f"{len(src_doc)} source / {len(tgt_doc)} target paragraphs"
        )
    m, n = len(src_doc.paragraphs), len(tgt_doc.paragraphs)
    src_tokens = flatten_document(src_doc)
    tgt_tokens = flatten_document(tgt_doc)
    matches, _stats = lcs_hunt_szymanski(src_tokens, tgt_tokens)
    links = build_links(matches, src_tokens, tgt_tokens)
    rates = compute_hit_rates(matches, src_tokens, tgt_tokens, src_doc, tgt_doc)
    kept, filt_src, filt_tgt = filter_nodes(links, rates, h_c)
    components = connected_components(kept)
    shells = canonicalize_groups(components, m, n, filt_src, filt_tgt)

    diagnostics = []
    groups = []
    for shell in shells:
        src_members = sorted(shell["src_members"])
        tgt_members = sorted(shell["tgt_members"])
        group = AlignmentGroup(
            src_range=(shell["src_min"], shell["src_max"]),
            tgt_range=(shell["tgt_min"], shell["tgt_max"]),
            src_members=src_members,
            tgt_members=tgt_members,
            hit_rate_src=min(rates.src[i] for i in src_members),
            hit_rate_tgt=min(rates.tgt[j] for j in tgt_members),
            src_text=" ".join(src_doc.paragraphs[i].text for i in src_members),
            tgt_text=" ".join(tgt_doc.paragraphs[j].text for j in tgt_members),
        )
        groups.append(group)
        src_share = (group.src_range[1] - group.src_range[0] + 1) / m
        tgt_share = (group.tgt_range[1] - group.tgt_range[0] + 1) / n
        if src_share > _WIDE_GROUP_SHARE or tgt_share > _WIDE_GROUP_SHARE:
            msg = (
                f"group src={group.src_range} tgt={group.tgt_range} covers more "
                f"than half of a document ({src_share:.0%} / {tgt_share:.0%})"
            )
            diagnostics.append(msg)
            logger.warning("%s: %s", src_doc.symbol, msg)

    member_src = set()
    member_tgt = set()
    for group in groups:
        member_src.update(group.src_members)
        member_tgt.update(group.tgt_members)
    dropped_src = sorted(set(range(m)) - member_src)
    dropped_tgt = sorted(set(range(n)) - member_tgt)
    return AlignmentResult(groups, dropped_src, dropped_tgt, rates, h_c, diagnostics)
