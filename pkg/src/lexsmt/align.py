"""IBM Model 1 lexical translation training and word alignment.

The E-step runs over every (source position, target position) cell of the
corpus at once: cells are gathered into flat arrays indexed by the
co-occurring word pair, so a whole iteration is a handful of bincounts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .corpus import ParallelCorpus, SentencePair

__all__ = [
    "NULL",
    "OOV_FLOOR",
    "TranslationTable",
    "AlignmentMatrix",
    "Model1Result",
    "train_model1",
    "viterbi_align",
    "symmetrize",
    "align_corpus",
    "write_table",
    "read_table",
    "write_alignments",
    "read_alignments",
]

log = logging.getLogger(__name__)

NULL = "<NULL>"
OOV_FLOOR = 1e-7
HEURISTICS = ("intersection", "union", "grow_diag")


@dataclass(frozen=True)
class TranslationTable:
    """t(target | source), normalized over targets for every source word."""

    probs: Dict[Tuple[str, str], float]  # (target, source) -> probability
    use_null: bool = True

    def prob(self, target: str, source: str, floor: float = 0.0) -> float:
        return self.probs.get((target, source), floor)

    def source_words(self) -> List[str]:
        return sorted({e for _, e in self.probs})

    def totals(self) -> Dict[str, float]:
        """Sum of t(.|e) per source word e; all should be 1."""
        out: Dict[str, float] = {}
        for (_, e), p in self.probs.items():
            out[e] = out.get(e, 0.0) + p
        return out


@dataclass(frozen=True)
class AlignmentMatrix:
    links: FrozenSet[Tuple[int, int]]  # (source_index, target_index)
    source_len: int
    target_len: int

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))
        for i, j in self.links:
            if not (0 <= i < self.source_len and 0 <= j < self.target_len):
                raise ValueError(
                    f"link ({i},{j}) outside {self.source_len}x{self.target_len} matrix"
                )

    def transposed(self) -> "AlignmentMatrix":
        return AlignmentMatrix(
            frozenset((j, i) for i, j in self.links), self.target_len, self.source_len
        )

    def __str__(self):
        return " ".join(f"{i}-{j}" for i, j in sorted(self.links))


@dataclass
class Model1Result:
    table: TranslationTable
    log_likelihood: List[float]


def train_model1(
    corpus: ParallelCorpus,
    iterations: int = 10,
    use_null: bool = True,
    tol: float = 1e-6,
) -> Model1Result:
    """Train t(target|source) by EM from a uniform start.

    Only clean pairs with tokens on both sides are used. The returned
    log-likelihood list holds log P(targets | sources) after each completed
    iteration; training stops early once the per-pair gain drops below `tol`.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pairs = [p for p in corpus.clean_pairs() if p.source and p.target]
    if not pairs:
        raise ValueError("Model 1 training needs at least one clean sentence pair")

    src_vocab = sorted({w for p in pairs for w in p.source})
    tgt_vocab = sorted({w for p in pairs for w in p.target})
    if use_null:
        src_vocab = [NULL] + [w for w in src_vocab if w != NULL]
    s_index = {w: i for i, w in enumerate(src_vocab)}
    t_index = {w: i for i, w in enumerate(tgt_vocab)}
    n_tgt = len(tgt_vocab)

    # One cell per (source position, target position) of every sentence.
    cell_pair: List[np.ndarray] = []
    cell_occ: List[np.ndarray] = []
    const = 0.0  # sum over sentences of -m * log(l)
    occ_base = 0
    for p in pairs:
        e_ids = np.array(([s_index[NULL]] if use_null else []) + [s_index[w] for w in p.source])
        f_ids = np.array([t_index[w] for w in p.target])
        l, m = len(e_ids), len(f_ids)
        cell_pair.append((e_ids[:, None] * n_tgt + f_ids[None, :]).ravel())
        cell_occ.append(np.tile(np.arange(occ_base, occ_base + m), l))
        occ_base += m
        const -= m * math.log(l)
    flat = np.concatenate(cell_pair)
    occ = np.concatenate(cell_occ)
    pair_keys, cell_to_pair = np.unique(flat, return_inverse=True)
    pair_src = pair_keys // n_tgt
    n_src = len(src_vocab)

    def estep(t):
        vals = t[cell_to_pair]
        denom = np.bincount(occ, weights=vals, minlength=occ_base)
        post = vals / denom[occ]
        counts = np.bincount(cell_to_pair, weights=post, minlength=len(pair_keys))
        return counts, float(np.log(denom).sum()) + const

    def mstep(counts):
        totals = np.bincount(pair_src, weights=counts, minlength=n_src)
        return counts / totals[pair_src]

    t = np.full(len(pair_keys), 1.0 / n_tgt)
    counts, ll = estep(t)
    history: List[float] = []
    for it in range(iterations):
        t = mstep(counts)
        counts, new_ll = estep(t)
        history.append(new_ll)
        log.debug("model1 iteration %d: log-likelihood %.6f", it + 1, new_ll)
        if (new_ll - ll) / len(pairs) < tol:
            break
        ll = new_ll

    probs = {
        (tgt_vocab[k % n_tgt], src_vocab[k // n_tgt]): float(v)
        for k, v in zip(pair_keys.tolist(), t.tolist())
    }
    return Model1Result(TranslationTable(probs, use_null), history)


def viterbi_align(pair: SentencePair, table: TranslationTable, floor: float = OOV_FLOOR) -> AlignmentMatrix:
    """Link each target token to its most probable source token.

    Ties go to the lowest source index. NULL wins only when strictly better
    than every real source word, and NULL links are left out.
    """
    links = set()
    for j, f in enumerate(pair.target):
        best_i, best_p = -1, -1.0
        for i, e in enumerate(pair.source):
            p = table.prob(f, e, floor)
            if p > best_p:
                best_i, best_p = i, p
        if table.use_null and table.prob(f, NULL, floor) > best_p:
            continue
        if best_i >= 0:
            links.add((best_i, j))
    return AlignmentMatrix(frozenset(links), len(pair.source), len(pair.target))


_NEIGHBORS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


def symmetrize(forward: AlignmentMatrix, backward: AlignmentMatrix, heuristic: str = "grow_diag") -> AlignmentMatrix:
    """Combine two alignments given in the same (source, target) orientation."""
    if (forward.source_len, forward.target_len) != (backward.source_len, backward.target_len):
        raise ValueError(
            f"dimension mismatch: {forward.source_len}x{forward.target_len} vs "
            f"{backward.source_len}x{backward.target_len}"
        )
    inter = forward.links & backward.links
    union = forward.links | backward.links
    if heuristic == "intersection":
        links = inter
    elif heuristic == "union":
        links = union
    elif heuristic == "grow_diag":
        current = set(inter)
        src_linked = {i for i, _ in current}
        tgt_linked = {j for _, j in current}
        added = True
        while added:
            added = False
            for i, j in sorted(current):
                for di, dj in _NEIGHBORS:
                    cand = (i + di, j + dj)
                    if cand in union and cand not in current and (
                        cand[0] not in src_linked or cand[1] not in tgt_linked
                    ):
                        current.add(cand)
                        src_linked.add(cand[0])
                        tgt_linked.add(cand[1])
                        added = True
        links = current
    else:
        raise ValueError(f"unknown heuristic {heuristic!r}; choose from {HEURISTICS}")
    return AlignmentMatrix(frozenset(links), forward.source_len, forward.target_len)


def align_corpus(
    corpus: ParallelCorpus,
    forward: TranslationTable,
    backward: TranslationTable,
    heuristic: str = "grow_diag",
) -> List[AlignmentMatrix]:
    """Symmetrized alignments for every clean pair, in corpus order.

    `backward` is a table trained on the swapped corpus (source given target).
    """
    out = []
    for p in corpus.clean_pairs():
        fwd = viterbi_align(p, forward)
        bwd = viterbi_align(p.swapped(), backward).transposed()
        out.append(symmetrize(fwd, bwd, heuristic))
    return out


def write_table(table: TranslationTable, path) -> None:
    """Dump `f<TAB>e<TAB>probability`, by target word then descending probability."""
    rows = sorted(table.probs.items(), key=lambda kv: (kv[0][0], -kv[1], kv[0][1]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# use_null={int(table.use_null)}\n")
        for (f, e), p in rows:
            fh.write(f"{f}\t{e}\t{p!r}\n")


def read_table(path) -> TranslationTable:
    probs = {}
    use_null = True
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# use_null="):
                use_null = line.endswith("1")
                continue
            if not line:
                continue
            f, e, p = line.split("\t")
            probs[(f, e)] = float(p)
    return TranslationTable(probs, use_null)


def write_alignments(alignments: Iterable[AlignmentMatrix], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in alignments:
            fh.write(str(a) + "\n")


def read_alignments(path, pairs: Sequence[SentencePair]) -> List[AlignmentMatrix]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if len(lines) != len(pairs):
        raise ValueError(f"{path}: {len(lines)} alignment lines for {len(pairs)} sentence pairs")
    out = []
    for line, p in zip(lines, pairs):
        links = frozenset(tuple(int(x) for x in tok.split("-")) for tok in line.split())
        out.append(AlignmentMatrix(links, len(p.source), len(p.target)))
    return out
