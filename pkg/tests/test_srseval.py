import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import min_edit_cost
from voiceshop import srseval
from voiceshop.errors import SchemaError, UndefinedMetricError

WORDS = ["red", "shoes", "cart", "add"]

tokens_st = st.lists(st.sampled_from(WORDS), max_size=6)


# ---------------------------------------------------------------------------
# Alignment against the independent oracle

class TestAlignOracle:
    def test_exhaustive_small_pairs_match_oracle(self):
        vocab = ["a", "b"]
        seqs = [
            tuple(c)
            for n in range(4)
            for c in itertools.product(vocab, repeat=n)
        ]
        for ref in seqs:
            for hyp in seqs:
                a = srseval.align(list(ref), list(hyp))
                cost = a.substitutions + a.deletions + a.insertions
                assert cost == min_edit_cost(ref, hyp), (ref, hyp)

    def test_seeded_random_pairs_match_oracle(self):
        rng = random.Random(20260814)
        for _ in range(2000):
            ref = [rng.choice(WORDS) for _ in range(rng.randint(0, 6))]
            hyp = [rng.choice(WORDS) for _ in range(rng.randint(0, 6))]
            a = srseval.align(ref, hyp)
            assert a.substitutions + a.deletions + a.insertions == min_edit_cost(
                tuple(ref), tuple(hyp)
            )

    @given(tokens_st, tokens_st)
    def test_count_identities(self, ref, hyp):
        a = srseval.align(ref, hyp)
        assert a.correct + a.substitutions + a.deletions == a.n_ref == len(ref)
        assert a.correct + a.substitutions + a.insertions == len(hyp)

    @given(tokens_st, tokens_st)
    def test_swap_symmetry(self, ref, hyp):
        a = srseval.align(ref, hyp)
        b = srseval.align(hyp, ref)
        assert (a.substitutions, a.deletions, a.insertions) == (
            b.substitutions, b.insertions, b.deletions
        )
        assert a.correct == b.correct

    @given(tokens_st, tokens_st)
    def test_ops_reconstruct_both_sides(self, ref, hyp):
        a = srseval.align(ref, hyp)
        rebuilt_ref = [r for (_tag, r, _h) in a.ops if r is not None]
        rebuilt_hyp = [h for (_tag, _r, h) in a.ops if h is not None]
        assert rebuilt_ref == ref
        assert rebuilt_hyp == hyp

    @given(tokens_st)
    def test_identity_alignment(self, ref):
        a = srseval.align(ref, list(ref))
        assert (a.substitutions, a.deletions, a.insertions) == (0, 0, 0)
        assert a.correct == len(ref)

    def test_spoken_example_substitution_and_deletion(self):
        a = srseval.align(
            "add red shoes to cart".split(), "add bread shoes cart".split()
        )
        assert (a.substitutions, a.deletions, a.insertions, a.correct) == (1, 1, 0, 3)

    def test_spoken_example_split_word(self):
        a = srseval.align(["checkout"], ["check", "out"])
        assert (a.substitutions, a.deletions, a.insertions) == (1, 0, 1)


# ---------------------------------------------------------------------------
# Metrics

class TestMetrics:
    def test_wer_and_accuracies_on_known_counts(self):
        a = srseval.align("a b c d".split(), "a b x".split())
        # one substitution, one deletion
        assert srseval.wer(a) == Fraction(2, 4) * 100
        assert srseval.eq1_accuracy(a) == Fraction(2, 4) * 100
        assert srseval.table4_word_accuracy(a) == Fraction(2, 4) * 100

    def test_insertions_count_double_in_table4(self):
        a = srseval.align(["a"], ["a", "b"])
        assert srseval.wer(a) == 100
        assert srseval.table4_word_accuracy(a) == -100

    def test_wer_can_exceed_100(self):
        a = srseval.align(["a"], ["x", "y", "z"])
        assert srseval.wer(a) > 100

    def test_empty_reference_is_undefined(self):
        a = srseval.align([], ["a"])
        for metric in (srseval.wer, srseval.eq1_accuracy, srseval.table4_word_accuracy):
            with pytest.raises(UndefinedMetricError):
                metric(a)

    @settings(max_examples=300)
    @given(tokens_st.filter(bool), tokens_st)
    def test_complementarity(self, ref, hyp):
        a = srseval.align(ref, hyp)
        assert srseval.eq1_accuracy(a) + srseval.wer(a) == 100

    def test_score_utterance_names_empty_reference(self):
        with pytest.raises(UndefinedMetricError, match="u7"):
            srseval.score_utterance("u7", [], ["a"])


# ---------------------------------------------------------------------------
# Rounding

class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (Fraction(0), 0.0),
            (Fraction(1, 20) * 10, 0.5),
            (Fraction(63, 2060) * 100, 3.1),
            (Fraction(205, 2060) * 100, 10.0),  # 9.951..
            (Fraction(5, 4), 1.3),  # 1.25 rounds half UP, not to even
            (Fraction(-5, 4), -1.3),
            (Fraction(100), 100.0),
            (Fraction(2, 3) * 100, 66.7),
        ],
    )
    def test_half_up_one_decimal(self, value, expected):
        assert srseval.round_half_up_1dp(value) == expected

    @given(st.fractions(min_value=-1000, max_value=1000))
    def test_rounding_error_bounded(self, value):
        rounded = Fraction(srseval.round_half_up_1dp(value)).limit_denominator(10)
        assert abs(rounded - value) <= Fraction(1, 20)


# ---------------------------------------------------------------------------
# Corpus reports

TWO_PAIR = [
    ("u1", "add red shoes to cart", "add bread shoes cart"),
    ("u2", "checkout", "check out"),
]


class TestCorpusReport:
    def test_two_pair_totals(self):
        rep = srseval.corpus_report(TWO_PAIR)
        t = rep.totals
        assert (t.n_ref, t.substitutions, t.deletions, t.insertions) == (6, 2, 1, 1)
        assert srseval.round_half_up_1dp(rep.wer_percent) == 66.7

    def test_identical_corpus_is_perfect(self):
        rep = srseval.corpus_report([("u1", "red shoes", "red shoes")])
        assert rep.wer_percent == 0
        assert rep.phrase_exact_match_rate_percent == 100
        assert rep.phrase_recognized_rate_percent == 100

    def test_empty_hypothesis_not_recognized(self):
        rep = srseval.corpus_report([("u1", "red shoes", ""), ("u2", "a", "a")])
        assert rep.phrase_recognized_rate_percent == 50
        assert rep.phrase_exact_match_rate_percent == 50

    def test_utterances_sorted_by_id(self):
        rep = srseval.corpus_report([("u2", "a", "a"), ("u1", "b", "b")])
        assert [u.utterance_id for u in rep.utterances] == ["u1", "u2"]

    def test_normalization_applied_to_both_sides(self):
        rep = srseval.corpus_report([("u1", "Red SHOES!", "red, shoes")])
        assert rep.wer_percent == 0

    def test_report_dict_has_fixed_field_names(self):
        doc = json.loads(srseval.report_to_json(srseval.corpus_report(TWO_PAIR)))
        for key in (
            "n_ref", "substitutions", "deletions", "insertions", "correct",
            "wer_percent", "eq1_accuracy_percent", "table4_word_accuracy_percent",
            "phrase_exact_match_rate_percent", "phrase_recognized_rate_percent",
            "sentence_stats",
        ):
            assert key in doc, key

    def test_json_is_deterministic(self):
        a = srseval.report_to_json(srseval.corpus_report(TWO_PAIR), per_utterance=True)
        b = srseval.report_to_json(srseval.corpus_report(list(TWO_PAIR)), per_utterance=True)
        assert a == b

    def test_render_report_mentions_all_metrics(self):
        text = srseval.render_report(srseval.corpus_report(TWO_PAIR))
        for needle in ("substitutions", "deletions", "insertions",
                       "phrase exact match rate", "phrase recognized rate"):
            assert needle in text

    def test_render_comparison_rows_sorted(self):
        rep = srseval.corpus_report(TWO_PAIR)
        text = srseval.render_comparison({"beta": rep, "alpha": rep})
        lines = [l for l in text.splitlines() if l.strip()]
        assert lines[0].startswith("system")
        assert lines[1].startswith("alpha")
        assert lines[2].startswith("beta")


class TestCorpusFiles:
    def test_plain_files_pair_by_line(self, tmp_path):
        ref = tmp_path / "ref.txt"
        hyp = tmp_path / "hyp.txt"
        ref.write_text("red shoes\ncheckout\n", encoding="utf-8")
        hyp.write_text("red shoe\ncheck out\n", encoding="utf-8")
        pairs = srseval.pair_corpus_files(ref, hyp)
        assert len(pairs) == 2
        assert pairs[0][1] == "red shoes"

    def test_tabbed_ids_respected(self, tmp_path):
        ref = tmp_path / "ref.txt"
        hyp = tmp_path / "hyp.txt"
        ref.write_text("x1\tred shoes\nx2\tcheckout\n", encoding="utf-8")
        hyp.write_text("x1\tred shoes\nx2\tcheckout\n", encoding="utf-8")
        pairs = srseval.pair_corpus_files(ref, hyp)
        assert [p[0] for p in pairs] == ["x1", "x2"]

    def test_line_count_mismatch_rejected(self, tmp_path):
        ref = tmp_path / "ref.txt"
        hyp = tmp_path / "hyp.txt"
        ref.write_text("a\nb\n", encoding="utf-8")
        hyp.write_text("a\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            srseval.pair_corpus_files(ref, hyp)

    def test_empty_file_rejected(self, tmp_path):
        ref = tmp_path / "ref.txt"
        ref.write_text("", encoding="utf-8")
        with pytest.raises(SchemaError):
            srseval.load_corpus_file(ref)
