"""BLEU, TER and an exact-match METEOR variant over tokenized text."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

__all__ = [
    "BleuResult",
    "TerResult",
    "MeteorResult",
    "EvalReport",
    "bleu_stats",
    "bleu_from_stats",
    "bleu",
    "edit_distance",
    "ter",
    "corpus_ter",
    "meteor_lite",
    "evaluate",
    "evaluate_corpus",
    "format_table",
]

Tokens = Sequence[str]


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hyp: Tokens, ref: Tokens, max_n: int = 4) -> Tuple[int, ...]:
    """(matches_1, total_1, ..., matches_N, total_N, hyp_len, ref_len)."""
    out: List[int] = []
    for n in range(1, max_n + 1):
        h, r = _ngrams(hyp, n), _ngrams(ref, n)
        out.append(sum(min(c, r[g]) for g, c in h.items()))
        out.append(max(len(hyp) - n + 1, 0))
    return tuple(out) + (len(hyp), len(ref))


@dataclass
class BleuResult:
    score: float
    precisions: List[float]
    brevity_penalty: float
    matches: List[int]
    totals: List[int]
    hyp_len: int
    ref_len: int


def bleu_from_stats(stats: Sequence[int], max_n: int = 4, smoothing: str = "none") -> BleuResult:
    """Corpus BLEU from summed sufficient statistics.

    "add1" adds one to numerator and denominator of every precision above
    unigrams.
    """
    if smoothing not in ("none", "add1"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    matches = [stats[2 * i] for i in range(max_n)]
    totals = [stats[2 * i + 1] for i in range(max_n)]
    c, r = stats[2 * max_n], stats[2 * max_n + 1]
    precisions = []
    for n, (m, t) in enumerate(zip(matches, totals), 1):
        if smoothing == "add1" and n > 1:
            precisions.append((m + 1) / (t + 1))
        else:
            precisions.append(m / t if t else 0.0)
    if c == 0:
        bp = 0.0
    elif c < r:
        bp = math.exp(1 - r / c)
    else:
        bp = 1.0
    if bp == 0.0 or min(precisions) == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    return BleuResult(min(score, 1.0), precisions, bp, matches, totals, c, r)


def bleu(hypotheses: Sequence[Tokens], references: Sequence[Tokens], max_n: int = 4,
         smoothing: str = "none") -> BleuResult:
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    total = [0] * (2 * max_n + 2)
    for h, r in zip(hypotheses, references):
        for k, v in enumerate(bleu_stats(h, r, max_n)):
            total[k] += v
    return bleu_from_stats(total, max_n, smoothing)


# --- TER -----------------------------------------------------------------

MAX_SHIFT_LEN = 10
MAX_SHIFTS = 50


def edit_distance(hyp: Tokens, ref: Tokens) -> Tuple[int, Dict[str, int]]:
    """Word-level Levenshtein distance and its insert/delete/substitute split.

    Insertions and deletions are counted in the direction hyp -> ref.
    """
    n, m = len(hyp), len(ref)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        hi = hyp[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (hi != ref[j - 1])
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)
    ops = {"ins": 0, "del": 0, "sub": 0}
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + (hyp[i - 1] != ref[j - 1]):
            ops["sub"] += hyp[i - 1] != ref[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops["del"] += 1
            i -= 1
        else:
            ops["ins"] += 1
            j -= 1
    return d[n][m], ops


def _edit_only(hyp: Tokens, ref: Tokens) -> int:
    m = len(ref)
    prev = list(range(m + 1))
    for i, hi in enumerate(hyp, 1):
        row = [i] + [0] * m
        for j in range(1, m + 1):
            row[j] = min(prev[j - 1] + (hi != ref[j - 1]), prev[j] + 1, row[j - 1] + 1)
        prev = row
    return prev[m]


@dataclass
class TerResult:
    edits: int
    ref_len: int
    shifts: int
    insertions: int
    deletions: int
    substitutions: int

    @property
    def score(self) -> float:
        return self.edits / self.ref_len if self.ref_len else 0.0


def _candidate_shifts(hyp: List[str], ref: Tokens):
    """Blocks of hyp that occur in ref, moved so they start at the ref position."""
    ref_starts: Dict[str, List[int]] = {}
    for j, w in enumerate(ref):
        ref_starts.setdefault(w, []).append(j)
    for i in range(len(hyp)):
        for j in ref_starts.get(hyp[i], ()):
            if i == j:
                continue
            length = 1
            while length <= MAX_SHIFT_LEN and i + length <= len(hyp) and j + length <= len(ref) \
                    and hyp[i + length - 1] == ref[j + length - 1]:
                if hyp[i : i + length] != list(ref[i : i + length]):
                    rest = hyp[:i] + hyp[i + length :]
                    dest = min(j, len(rest))
                    moved = rest[:dest] + hyp[i : i + length] + rest[dest:]
                    if moved != hyp:
                        yield moved
                length += 1


def ter(hypothesis: Tokens, reference: Tokens, shifts: bool = True) -> TerResult:
    """Greedy-shift translation edit rate of one sentence.

    Each round applies the single block shift with the largest drop in edit
    distance, provided the drop exceeds the shift's own cost of one edit.
    """
    if not reference:
        raise ValueError("TER needs a non-empty reference")
    hyp = list(hypothesis)
    n_shifts = 0
    current = _edit_only(hyp, reference)
    while shifts and n_shifts < MAX_SHIFTS and current > 0:
        best, best_ed = None, current - 1
        for moved in _candidate_shifts(hyp, reference):
            ed = _edit_only(moved, reference)
            if ed < best_ed:
                best, best_ed = moved, ed
        if best is None:
            break
        hyp, current = best, best_ed
        n_shifts += 1
    dist, ops = edit_distance(hyp, reference)
    return TerResult(dist + n_shifts, len(reference), n_shifts, ops["ins"], ops["del"], ops["sub"])


def corpus_ter(hypotheses: Sequence[Tokens], references: Sequence[Tokens], shifts: bool = True) -> float:
    results = [ter(h, r, shifts) for h, r in zip(hypotheses, references)]
    return sum(r.edits for r in results) / sum(r.ref_len for r in results)


# --- METEOR --------------------------------------------------------------

MAX_SEARCH_NODES = 200_000


@dataclass
class MeteorResult:
    score: float
    precision: float
    recall: float
    fmean: float
    chunks: int
    matches: int


def _min_chunk_alignment(hyp: Tokens, ref: Tokens) -> Tuple[int, int]:
    """Maximum exact matching with the fewest chunks, by branch and bound."""
    hc, rc = Counter(hyp), Counter(ref)
    still = Counter({w: min(c, rc[w]) for w, c in hc.items() if rc[w]})
    m = sum(still.values())
    if m == 0:
        return 0, 0
    ref_pos: Dict[str, List[int]] = {}
    for j, w in enumerate(ref):
        ref_pos.setdefault(w, []).append(j)
    # occurrences of each word in hyp[i + 1:]
    later: List[Counter] = []
    acc: Counter = Counter()
    for w in reversed(hyp):
        later.append(acc.copy())
        acc[w] += 1
    later.reverse()

    best = [m + 1]
    budget = [MAX_SEARCH_NODES]
    used = set()

    def walk(i, prev_ref, chunks):
        # prev_ref: ref position matched by hyp[i - 1], or None
        budget[0] -= 1
        if chunks >= best[0] or budget[0] < 0:
            return
        if i == len(hyp):
            best[0] = chunks
            return
        w = hyp[i]
        if still[w] > 0:
            cands = [j for j in ref_pos[w] if j not in used]
            if prev_ref is not None:
                cands.sort(key=lambda j: j != prev_ref + 1)
            for j in cands:
                used.add(j)
                still[w] -= 1
                walk(i + 1, j, chunks + (prev_ref is None or j != prev_ref + 1))
                still[w] += 1
                used.discard(j)
        if later[i][w] >= still[w]:
            walk(i + 1, None, chunks)

    walk(0, None, 0)
    if best[0] <= m:
        return m, best[0]
    # budget ran out before any complete alignment: fall back to greedy
    need = Counter({w: min(c, rc[w]) for w, c in hc.items()})
    taken, chunks, prev = set(), 0, None
    for i, w in enumerate(hyp):
        if need[w] == 0:
            prev = None
            continue
        j = next(j for j in ref_pos[w] if j not in taken)
        taken.add(j)
        need[w] -= 1
        chunks += prev is None or j != prev + 1
        prev = j
    return m, chunks


def meteor_lite(hypothesis: Tokens, reference: Tokens, alpha: float = 0.9, beta: float = 3.0,
                gamma: float = 0.5) -> MeteorResult:
    m, chunks = _min_chunk_alignment(list(hypothesis), list(reference))
    if m == 0:
        return MeteorResult(0.0, 0.0, 0.0, 0.0, 0, 0)
    p, r = m / len(hypothesis), m / len(reference)
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    penalty = gamma * (chunks / m) ** beta
    return MeteorResult(fmean * (1 - penalty), p, r, fmean, chunks, m)


# --- reports -------------------------------------------------------------


@dataclass
class EvalReport:
    bleu: float  # 0..1
    meteor: float  # 0..1, mean of sentence scores
    ter: float  # edits / reference words
    bleu_detail: BleuResult
    sentence_meteor: List[float] = field(default_factory=list)
    sentence_ter: List[float] = field(default_factory=list)
    ter_edits: int = 0
    ter_ref_len: int = 0

    def row(self) -> Tuple[float, float, float]:
        """(BLEU x100, METEOR, TER x100), the usual reporting scales."""
        return (100 * self.bleu, self.meteor, 100 * self.ter)

    def dump(self) -> str:
        lines = [
            f"BLEU\t{100 * self.bleu:.2f}",
            f"METEOR\t{self.meteor:.3f}",
            f"TER\t{100 * self.ter:.2f}",
            f"bleu_brevity_penalty\t{self.bleu_detail.brevity_penalty:.6f}",
            f"hyp_len\t{self.bleu_detail.hyp_len}",
            f"ref_len\t{self.bleu_detail.ref_len}",
            f"ter_edits\t{self.ter_edits}",
        ]
        for n, p in enumerate(self.bleu_detail.precisions, 1):
            lines.append(f"bleu_p{n}\t{p:.6f}")
        return "\n".join(lines) + "\n"


def evaluate(hypotheses: Sequence[Tokens], references: Sequence[Tokens]) -> EvalReport:
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    b = bleu(hypotheses, references)
    ters = [ter(h, r) for h, r in zip(hypotheses, references)]
    mets = [meteor_lite(h, r).score for h, r in zip(hypotheses, references)]
    edits = sum(t.edits for t in ters)
    ref_len = sum(t.ref_len for t in ters)
    return EvalReport(
        bleu=b.score,
        meteor=sum(mets) / len(mets) if mets else 0.0,
        ter=edits / ref_len if ref_len else 0.0,
        bleu_detail=b,
        sentence_meteor=mets,
        sentence_ter=[t.score for t in ters],
        ter_edits=edits,
        ter_ref_len=ref_len,
    )


def evaluate_corpus(hyp_file, ref_file) -> EvalReport:
    from .corpus import _read_lines, tokenize

    hyps = _read_lines(hyp_file)
    refs = _read_lines(ref_file)
    if len(hyps) != len(refs):
        raise ValueError(f"{hyp_file} has {len(hyps)} lines, {ref_file} has {len(refs)}")
    return evaluate([tokenize(h, "target") for h in hyps], [tokenize(r, "target") for r in refs])


def format_table(rows: Sequence[Tuple[str, str, Optional[EvalReport]]], title: str = "") -> str:
    """Text table with one row per (system, tuning) and BLEU / METEOR / TER columns.

    A row whose report is None is printed as failed.
    """
    name_w = max([len("System")] + [len(r[0]) for r in rows])
    tune_w = max([len("Tuning")] + [len(r[1]) for r in rows])
    out = []
    if title:
        out.append(title)
    out.append(f"{'System':<{name_w}}  {'Tuning':<{tune_w}}  {'BLEU score':>10}  {'METEOR':>7}  {'TER':>7}")
    for name, tuning, rep in rows:
        if rep is None:
            out.append(f"{name:<{name_w}}  {tuning:<{tune_w}}  {'failed':>10}  {'-':>7}  {'-':>7}")
        else:
            b, m, t = rep.row()
            out.append(f"{name:<{name_w}}  {tuning:<{tune_w}}  {b:>10.2f}  {m:>7.3f}  {t:>7.2f}")
    return "\n".join(out) + "\n"
