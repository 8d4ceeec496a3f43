"""Speech-recognition scoring: reference/hypothesis alignment, word error
rate, accuracy variants, phrase rates, and corpus reports.

All metric arithmetic is exact (fractions.Fraction); rounding to one decimal
(half-up) happens only when a report is rendered or serialized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import SchemaError, UndefinedMetricError
from .textnorm import normalize

# Alignment op tags. ops are (tag, ref_word | None, hyp_word | None) tuples.
MATCH = "match"
SUB = "sub"
DEL = "del"
INS = "ins"


@dataclass(frozen=True)
class Alignment:
    """Minimal unit-cost edit alignment between a reference and a hypothesis.

    C + S + D == n_ref, C + S + I == hypothesis length, and S + D + I is the
    edit distance. Among minimal-cost alignments the one maximizing paired
    (match/sub) steps is chosen, which makes the counts unique and symmetric:
    swapping the two sides swaps D and I and preserves S.
    """

    n_ref: int
    substitutions: int
    deletions: int
    insertions: int
    correct: int
    ops: tuple[tuple[str, str | None, str | None], ...] = ()

    @property
    def n_hyp(self) -> int:
        return self.correct + self.substitutions + self.insertions

    @property
    def edit_distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def align(reference: list[str], hypothesis: list[str]) -> Alignment:
    """Align two token sequences at unit cost (sub = del = ins = 1).

    Ties between minimal alignments are resolved by first maximizing the
    number of paired steps, then preferring match/sub over del over ins
    during the backtrace, so the op sequence is deterministic.
    """
    n, m = len(reference), len(hypothesis)
    # d[i][j] = min edit cost for ref[:i] vs hyp[:j];
    # g[i][j] = max paired (diagonal) steps among min-cost paths.
    d = [[0] * (m + 1) for _ in range(n + 1)]
    g = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ref_word = reference[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ref_word == hypothesis[j - 1] else 1
            best = min(d[i - 1][j - 1] + cost, d[i - 1][j] + 1, d[i][j - 1] + 1)
            paired = -1
            if d[i - 1][j - 1] + cost == best:
                paired = g[i - 1][j - 1] + 1
            if d[i - 1][j] + 1 == best:
                paired = max(paired, g[i - 1][j])
            if d[i][j - 1] + 1 == best:
                paired = max(paired, g[i][j - 1])
            d[i][j] = best
            g[i][j] = paired

    ops: list[tuple[str, str | None, str | None]] = []
    subs = dels = inss = correct = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if reference[i - 1] == hypothesis[j - 1] else 1
            if d[i][j] == d[i - 1][j - 1] + cost and g[i][j] == g[i - 1][j - 1] + 1:
                if cost == 0:
                    correct += 1
                    ops.append((MATCH, reference[i - 1], hypothesis[j - 1]))
                else:
                    subs += 1
                    ops.append((SUB, reference[i - 1], hypothesis[j - 1]))
                i -= 1
                j -= 1
                continue
        if i > 0 and d[i][j] == d[i - 1][j] + 1 and g[i][j] == g[i - 1][j]:
            dels += 1
            ops.append((DEL, reference[i - 1], None))
            i -= 1
        else:
            inss += 1
            ops.append((INS, None, hypothesis[j - 1]))
            j -= 1
    ops.reverse()
    return Alignment(
        n_ref=n,
        substitutions=subs,
        deletions=dels,
        insertions=inss,
        correct=correct,
        ops=tuple(ops),
    )


def _require_ref(a: Alignment) -> None:
    if a.n_ref == 0:
        raise UndefinedMetricError("metric undefined for an empty reference")


def wer(a: Alignment) -> Fraction:
    """Word error rate: (S + D + I) / N x 100. May exceed 100."""
    _require_ref(a)
    return Fraction(a.edit_distance, a.n_ref) * 100


def eq1_accuracy(a: Alignment) -> Fraction:
    """Word-level accuracy (N - S - D - I) / N x 100; complements wer to 100."""
    _require_ref(a)
    return Fraction(a.n_ref - a.edit_distance, a.n_ref) * 100


def table4_word_accuracy(a: Alignment) -> Fraction:
    """Word-accuracy variant (N - S - D - 2I) / N x 100.

    Counts each insertion twice, so it is stricter than eq1_accuracy on
    hypotheses that hallucinate extra words. Kept separate so eq1_accuracy
    stays the pure complement of wer.
    """
    _require_ref(a)
    return Fraction(a.n_ref - a.substitutions - a.deletions - 2 * a.insertions, a.n_ref) * 100


@dataclass(frozen=True)
class UtteranceScore:
    utterance_id: str
    alignment: Alignment
    wer_percent: Fraction
    eq1_accuracy_percent: Fraction
    exact_match: bool
    recognized: bool  # hypothesis nonempty


def score_utterance(utterance_id: str, reference: list[str], hypothesis: list[str]) -> UtteranceScore:
    if not reference:
        raise UndefinedMetricError(
            f"utterance {utterance_id!r}: reference normalizes to no words"
        )
    a = align(reference, hypothesis)
    return UtteranceScore(
        utterance_id=utterance_id,
        alignment=a,
        wer_percent=wer(a),
        eq1_accuracy_percent=eq1_accuracy(a),
        exact_match=reference == hypothesis,
        recognized=len(hypothesis) > 0,
    )


def phrase_rates(scores: list[UtteranceScore]) -> tuple[Fraction, Fraction]:
    """(exact_match_rate, recognized_rate) as percents over all utterances.

    recognized counts any nonempty hypothesis, correct or not.
    """
    if not scores:
        raise UndefinedMetricError("phrase rates undefined for an empty corpus")
    total = len(scores)
    exact = sum(1 for s in scores if s.exact_match)
    recognized = sum(1 for s in scores if s.recognized)
    return Fraction(exact, total) * 100, Fraction(recognized, total) * 100


@dataclass(frozen=True)
class SentenceStats:
    total: int
    with_errors: int
    with_substitutions: int
    with_deletions: int
    with_insertions: int

    def percent(self, count: int) -> Fraction:
        return Fraction(count, self.total) * 100


def sentence_stats(scores: list[UtteranceScore]) -> SentenceStats:
    """Counts of utterances containing at least one error / sub / del / ins."""
    if not scores:
        raise UndefinedMetricError("sentence stats undefined for an empty corpus")
    return SentenceStats(
        total=len(scores),
        with_errors=sum(1 for s in scores if s.alignment.edit_distance > 0),
        with_substitutions=sum(1 for s in scores if s.alignment.substitutions > 0),
        with_deletions=sum(1 for s in scores if s.alignment.deletions > 0),
        with_insertions=sum(1 for s in scores if s.alignment.insertions > 0),
    )


@dataclass(frozen=True)
class CorpusReport:
    totals: Alignment
    wer_percent: Fraction
    eq1_accuracy_percent: Fraction
    table4_word_accuracy_percent: Fraction
    per_type_percent: dict[str, Fraction]  # substitutions/deletions/insertions over N
    sentence_stats: SentenceStats
    phrase_exact_match_rate_percent: Fraction
    phrase_recognized_rate_percent: Fraction
    utterances: tuple[UtteranceScore, ...] = field(repr=False, default=())


def corpus_report(pairs: list[tuple[str, str, str]]) -> CorpusReport:
    """Score a corpus of (utterance_id, reference_text, hypothesis_text).

    Both texts are normalized before alignment. Utterances are processed and
    reported in ascending id order, so identical input yields identical output.
    """
    if not pairs:
        raise UndefinedMetricError("report undefined for an empty corpus")
    scores = [
        score_utterance(uid, normalize(ref), normalize(hyp))
        for uid, ref, hyp in sorted(pairs, key=lambda p: p[0])
    ]
    totals = Alignment(
        n_ref=sum(s.alignment.n_ref for s in scores),
        substitutions=sum(s.alignment.substitutions for s in scores),
        deletions=sum(s.alignment.deletions for s in scores),
        insertions=sum(s.alignment.insertions for s in scores),
        correct=sum(s.alignment.correct for s in scores),
    )
    exact_rate, recognized_rate = phrase_rates(scores)
    return CorpusReport(
        totals=totals,
        wer_percent=wer(totals),
        eq1_accuracy_percent=eq1_accuracy(totals),
        table4_word_accuracy_percent=table4_word_accuracy(totals),
        per_type_percent={
            "substitutions": Fraction(totals.substitutions, totals.n_ref) * 100,
            "deletions": Fraction(totals.deletions, totals.n_ref) * 100,
            "insertions": Fraction(totals.insertions, totals.n_ref) * 100,
        },
        sentence_stats=sentence_stats(scores),
        phrase_exact_match_rate_percent=exact_rate,
        phrase_recognized_rate_percent=recognized_rate,
        utterances=tuple(scores),
    )


# ---------------------------------------------------------------------------
# Display rounding and serialization

def round_half_up_1dp(value: Fraction) -> float:
    """Round to one decimal, halves away from zero, exactly (no float drift)."""
    scaled = value * 10
    if scaled >= 0:
        tenths = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    else:
        tenths = -((-2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator))
    return tenths / 10


def fmt_percent(value: Fraction) -> str:
    return f"{round_half_up_1dp(value):.1f}"


def _sentence_stats_dict(st: SentenceStats) -> dict:
    def entry(count: int) -> dict:
        return {"count": count, "percent": round_half_up_1dp(st.percent(count))}

    return {
        "total": st.total,
        "with_errors": entry(st.with_errors),
        "with_substitutions": entry(st.with_substitutions),
        "with_deletions": entry(st.with_deletions),
        "with_insertions": entry(st.with_insertions),
    }


def report_to_dict(report: CorpusReport) -> dict:
    """Structured-record form of a corpus report (percent fields rounded)."""
    t = report.totals
    return {
        "utterances": len(report.utterances),
        "n_ref": t.n_ref,
        "substitutions": t.substitutions,
        "deletions": t.deletions,
        "insertions": t.insertions,
        "correct": t.correct,
        "wer_percent": round_half_up_1dp(report.wer_percent),
        "eq1_accuracy_percent": round_half_up_1dp(report.eq1_accuracy_percent),
        "table4_word_accuracy_percent": round_half_up_1dp(report.table4_word_accuracy_percent),
        "per_type_percent": {
            kind: round_half_up_1dp(value)
            for kind, value in report.per_type_percent.items()
        },
        "phrase_exact_match_rate_percent": round_half_up_1dp(report.phrase_exact_match_rate_percent),
        "phrase_recognized_rate_percent": round_half_up_1dp(report.phrase_recognized_rate_percent),
        "sentence_stats": _sentence_stats_dict(report.sentence_stats),
    }


def utterance_to_dict(score: UtteranceScore) -> dict:
    a = score.alignment
    return {
        "id": score.utterance_id,
        "n_ref": a.n_ref,
        "substitutions": a.substitutions,
        "deletions": a.deletions,
        "insertions": a.insertions,
        "correct": a.correct,
        "wer_percent": round_half_up_1dp(score.wer_percent),
        "eq1_accuracy_percent": round_half_up_1dp(score.eq1_accuracy_percent),
        "exact_match": score.exact_match,
        "recognized": score.recognized,
    }


def render_report(report: CorpusReport) -> str:
    """Human-readable table, percents rounded half-up to one decimal."""
    t = report.totals
    st = report.sentence_stats
    rows = [
        ("utterances", str(len(report.utterances)), ""),
        ("reference words (N)", str(t.n_ref), ""),
        ("errors (S+D+I)", str(t.edit_distance), fmt_percent(report.wer_percent)),
        ("correct words (N-S-D-I)", str(t.n_ref - t.edit_distance), fmt_percent(report.eq1_accuracy_percent)),
        ("substitutions", str(t.substitutions), fmt_percent(report.per_type_percent["substitutions"])),
        ("deletions", str(t.deletions), fmt_percent(report.per_type_percent["deletions"])),
        ("insertions", str(t.insertions), fmt_percent(report.per_type_percent["insertions"])),
        ("word accuracy (insertions x2)", "", fmt_percent(report.table4_word_accuracy_percent)),
        ("sentences with any error", str(st.with_errors), fmt_percent(st.percent(st.with_errors))),
        ("sentences with substitutions", str(st.with_substitutions), fmt_percent(st.percent(st.with_substitutions))),
        ("sentences with deletions", str(st.with_deletions), fmt_percent(st.percent(st.with_deletions))),
        ("sentences with insertions", str(st.with_insertions), fmt_percent(st.percent(st.with_insertions))),
        ("phrase exact match rate", "", fmt_percent(report.phrase_exact_match_rate_percent)),
        ("phrase recognized rate", "", fmt_percent(report.phrase_recognized_rate_percent)),
    ]
    lines = [f"{'metric':<32}{'count':>8}{'percent':>10}"]
    for name, count, percent in rows:
        lines.append(f"{name:<32}{count:>8}{percent:>10}")
    return "\n".join(lines)


def render_comparison(reports: dict[str, CorpusReport]) -> str:
    """Side-by-side summary of several hypothesis systems against one reference."""
    header = (
        f"{'system':<20}{'wer':>8}{'eq1_acc':>9}{'word_acc':>10}"
        f"{'exact':>8}{'recognized':>12}"
    )
    lines = [header]
    for name in sorted(reports):
        r = reports[name]
        lines.append(
            f"{name:<20}"
            f"{fmt_percent(r.wer_percent):>8}"
            f"{fmt_percent(r.eq1_accuracy_percent):>9}"
            f"{fmt_percent(r.table4_word_accuracy_percent):>10}"
            f"{fmt_percent(r.phrase_exact_match_rate_percent):>8}"
            f"{fmt_percent(r.phrase_recognized_rate_percent):>12}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Corpus file loading

def load_corpus_file(path: str | Path) -> list[tuple[str, str]]:
    """Read one utterance per line; returns (id, text) pairs.

    Plain files get zero-padded line ids; if the first line contains a TAB the
    whole file must use the "id<TAB>text" form.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty corpus file")
    id_prefixed = "\t" in lines[0]
    width = len(str(len(lines)))
    out = []
    for lineno, line in enumerate(lines, start=1):
        if id_prefixed:
            if "\t" not in line:
                raise SchemaError(f"{path}:{lineno}: expected id<TAB>text")
            uid, text = line.split("\t", 1)
            if not uid:
                raise SchemaError(f"{path}:{lineno}: empty utterance id")
        else:
            uid, text = f"u{lineno:0{width}d}", line
        out.append((uid, text))
    return out


def pair_corpus_files(ref_path: str | Path, hyp_path: str | Path) -> list[tuple[str, str, str]]:
    """Pair parallel reference/hypothesis files line by line.

    Line-count mismatch is a hard error; when both files carry ids they must
    agree on every line.
    """
    refs = load_corpus_file(ref_path)
    hyps = load_corpus_file(hyp_path)
    if len(refs) != len(hyps):
        raise SchemaError(
            f"line count mismatch: {ref_path} has {len(refs)} lines, "
            f"{hyp_path} has {len(hyps)}"
        )
    pairs = []
    for (ref_id, ref_text), (hyp_id, hyp_text) in zip(refs, hyps):
        if ref_id != hyp_id:
            raise SchemaError(
                f"utterance id mismatch: {ref_id!r} in {ref_path} vs "
                f"{hyp_id!r} in {hyp_path}"
            )
        pairs.append((ref_id, ref_text, hyp_text))
    return pairs


def report_to_json(report: CorpusReport, per_utterance: bool = False) -> str:
    doc = report_to_dict(report)
    if per_utterance:
        doc["per_utterance"] = [utterance_to_dict(s) for s in report.utterances]
    return json.dumps(doc, sort_keys=True)
