import json
import os
import signal
import subprocess
import sys
import time

import pytest

from voiceshop import paths

REF = str(paths.eval_sample_path("ref.txt"))
HYP_A = str(paths.eval_sample_path("hyp_alpha.txt"))
HYP_B = str(paths.eval_sample_path("hyp_beta.txt"))
GOLDEN = str(paths.golden_script_path())


def run_cli(*args, timeout=60):
    return subprocess.run(
        [sys.executable, "-m", "voiceshop.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


class TestUsage:
    def test_no_command_is_usage_error(self):
        assert run_cli().returncode == 2

    def test_unknown_command_is_usage_error(self):
        assert run_cli("frobnicate").returncode == 2

    def test_help_exits_zero(self):
        result = run_cli("--help")
        assert result.returncode == 0
        assert "eval" in result.stdout
        assert "serve" in result.stdout
        assert "replay" in result.stdout


class TestEval:
    def test_table_output(self):
        result = run_cli("eval", "--ref", REF, "--hyp", HYP_A)
        assert result.returncode == 0
        assert "reference words (N)" in result.stdout
        assert "phrase exact match rate" in result.stdout

    def test_json_output_has_fixed_fields(self):
        result = run_cli("eval", "--ref", REF, "--hyp", HYP_A, "--json")
        assert result.returncode == 0
        doc = json.loads(result.stdout)
        for key in ("n_ref", "wer_percent", "eq1_accuracy_percent",
                    "table4_word_accuracy_percent", "sentence_stats"):
            assert key in doc

    def test_per_utterance_json_lists_all_lines(self):
        result = run_cli("eval", "--ref", REF, "--hyp", HYP_A, "--json",
                         "--per-utterance")
        doc = json.loads(result.stdout)
        assert len(doc["per_utterance"]) == 20

    def test_identical_files_score_perfect(self):
        result = run_cli("eval", "--ref", REF, "--hyp", REF, "--json")
        doc = json.loads(result.stdout)
        assert doc["wer_percent"] == 0.0
        assert doc["phrase_exact_match_rate_percent"] == 100.0

    def test_comparison_lists_each_system(self):
        result = run_cli("eval", "--ref", REF, "--hyp", HYP_A, "--hyp", HYP_B)
        assert result.returncode == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("system")
        assert any(l.startswith("hyp_alpha") for l in lines)
        assert any(l.startswith("hyp_beta") for l in lines)

    def test_line_count_mismatch_exits_2(self, tmp_path):
        short = tmp_path / "short.txt"
        short.write_text("only one line\n", encoding="utf-8")
        result = run_cli("eval", "--ref", REF, "--hyp", str(short))
        assert result.returncode == 2
        assert "SCHEMA" in result.stderr

    def test_empty_file_exits_2(self, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("", encoding="utf-8")
        result = run_cli("eval", "--ref", str(empty), "--hyp", str(empty))
        assert result.returncode == 2

    def test_missing_file_exits_2(self):
        result = run_cli("eval", "--ref", REF, "--hyp", "/nope/missing.txt")
        assert result.returncode == 2


class TestReplay:
    def test_golden_replay_final_record(self):
        result = run_cli("replay", "--script", GOLDEN)
        assert result.returncode == 0
        records = [json.loads(l) for l in result.stdout.splitlines()]
        assert len(records) == 13
        assert records[-1]["outcome"]["state"]["page"]["kind"] == "ORDER_PLACED"
        assert records[-1]["outcome"]["state"]["cart"]["lines"] == []

    def test_byte_identical_across_runs(self):
        first = run_cli("replay", "--script", GOLDEN)
        second = run_cli("replay", "--script", GOLDEN)
        assert first.stdout == second.stdout
        assert first.stdout.encode() == second.stdout.encode()

    def test_empty_script_zero_records(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        result = run_cli("replay", "--script", str(empty))
        assert result.returncode == 0
        assert result.stdout == ""

    def test_schema_error_exits_2_with_nothing_replayed(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"seq": 1, "text": "a"}\n', encoding="utf-8")
        result = run_cli("replay", "--script", str(bad))
        assert result.returncode == 2
        assert result.stdout == ""

    def test_stale_seq_produces_ordering_record(self, tmp_path):
        script = tmp_path / "stale.jsonl"
        script.write_text(
            '{"seq": 2, "text": "help", "is_final": true}\n'
            '{"seq": 1, "text": "help", "is_final": true}\n',
            encoding="utf-8",
        )
        result = run_cli("replay", "--script", str(script))
        assert result.returncode == 0
        records = [json.loads(l) for l in result.stdout.splitlines()]
        assert records[1]["outcome"]["error"]["code"] == "ORDERING"


class TestServe:
    def test_bad_catalog_exits_2_before_binding(self, tmp_path):
        bad = tmp_path / "catalog.json"
        bad.write_text("[]", encoding="utf-8")
        result = run_cli("serve", "--catalog", str(bad), timeout=30)
        assert result.returncode == 2
        assert "SCHEMA" in result.stderr

    def test_startup_logs_vocab_class(self):
        process = subprocess.Popen(
            [sys.executable, "-m", "voiceshop.cli", "serve", "--port", "0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        try:
            deadline = time.monotonic() + 20
            seen = []
            while time.monotonic() < deadline:
                line = process.stderr.readline()
                if not line:
                    break
                seen.append(line)
                if "vocab_class=SMALL" in line:
                    break
            else:
                pytest.fail(f"no vocab_class log line within deadline: {seen}")
            assert any("vocab_class=SMALL" in l for l in seen), seen
        finally:
            process.send_signal(signal.SIGINT)
            try:
                process.wait(timeout=10)
            except subprocess.TimeoutExpired:
                process.kill()
                process.wait()
