import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from notation.agent import LoopConfig, run_trajectory
from notation.tokens import (
    BpeTokenizer,
    ByteCountTokenizer,
    TokenBreakdown,
    UntaggedSpanError,
    VocabLoadError,
    WordRegexTokenizer,
    count_tokens,
    decompose,
    delta_vs_baseline,
    make_tokenizer,
    round_pct,
)
from notation.agent import Span

from conftest import simple_run_pieces


def test_empty_counts_zero():
    for tok in (ByteCountTokenizer(), WordRegexTokenizer()):
        assert count_tokens("", tok) == 0


def test_byte_count_is_utf8_length():
    tok = ByteCountTokenizer()
    assert tok.count("abc") == 3
    assert tok.count("café") == 5
    assert tok.count("✓") == 3


def test_word_regex_counting():
    tok = WordRegexTokenizer()
    assert tok.count("hello world") == 2
    assert tok.count('{"a":1}') == 7  # { " a " : 1 } each symbol separate, spaces free
    assert tok.count("a,b,c") == 5


def test_byte_count_monotone_under_append():
    tok = ByteCountTokenizer()
    base = "some span"
    for extra in ("", "x", " more text", "é"):
        assert tok.count(base + extra) >= tok.count(base)


def test_golden_toon_fixture_cheaper_than_json():
    from conftest import FIXTURES

    tok = ByteCountTokenizer()
    toon = (FIXTURES / "figure3.toon").read_text()
    minimal_json = (FIXTURES / "figure3.json").read_text()
    assert count_tokens(toon, tok) < count_tokens(minimal_json, tok)


def write_bpe_files(tmp_path, vocab: dict, merges: list[str]):
    vocab_path = tmp_path / "vocab.json"
    merges_path = tmp_path / "merges.txt"
    vocab_path.write_text(json.dumps(vocab))
    merges_path.write_text("\n".join(merges) + "\n")
    return vocab_path, merges_path


def test_bpe_merges_pairs(tmp_path):
    vocab = {"a": 0, "b": 1, "c": 2, "ab": 3, "abc": 4}
    vocab_path, merges_path = write_bpe_files(tmp_path, vocab, ["#version: test", "a b", "ab c"])
    tok = BpeTokenizer.from_files(vocab_path, merges_path)
    assert tok.count("abc") == 1
    assert tok.count("ab") == 1
    assert tok.count("ba") == 2
    assert tok.count("abcabc") == 2
    assert tok.count("") == 0


def test_bpe_unknown_bytes_fall_back(tmp_path):
    vocab = {"a": 0, "b": 1, "ab": 2}
    vocab_path, merges_path = write_bpe_files(tmp_path, vocab, ["a b"])
    tok = BpeTokenizer.from_files(vocab_path, merges_path)
    # 'xyz' has no merges; every byte stands alone
    assert tok.count("xyz") == 3
    # multibyte char splits into its bytes
    assert tok.count("é") == 2


def test_bpe_merge_rank_order(tmp_path):
    # "bc" merges first (lower rank) even though "ab" appears earlier in text
    vocab = {"a": 0, "b": 1, "c": 2, "bc": 3, "ab": 4}
    vocab_path, merges_path = write_bpe_files(tmp_path, vocab, ["b c", "a b"])
    tok = BpeTokenizer.from_files(vocab_path, merges_path)
    assert tok.count("abc") == 2  # a + bc


def test_bpe_load_errors(tmp_path):
    with pytest.raises(VocabLoadError):
        BpeTokenizer.from_files(tmp_path / "missing.json", tmp_path / "missing.txt")
    bad_vocab = tmp_path / "bad.json"
    bad_vocab.write_text("not json")
    merges = tmp_path / "merges.txt"
    merges.write_text("a b\n")
    with pytest.raises(VocabLoadError):
        BpeTokenizer.from_files(bad_vocab, merges)
    ok_vocab = tmp_path / "ok.json"
    ok_vocab.write_text(json.dumps({"a": 0}))
    bad_merges = tmp_path / "bad_merges.txt"
    bad_merges.write_text("a b c\n")
    with pytest.raises(VocabLoadError):
        BpeTokenizer.from_files(ok_vocab, bad_merges)
    with pytest.raises(VocabLoadError):
        make_tokenizer("bpe", None, None)


def test_bpe_deterministic(tmp_path):
    vocab = {"a": 0, "b": 1, "ab": 2}
    vocab_path, merges_path = write_bpe_files(tmp_path, vocab, ["a b"])
    t1 = BpeTokenizer.from_files(vocab_path, merges_path)
    t2 = BpeTokenizer.from_files(vocab_path, merges_path)
    text = "ababab" * 10
    assert t1.count(text) == t2.count(text)


def test_round_pct_half_away_from_zero():
    assert round_pct(1.25) == 1.3
    assert round_pct(-1.25) == -1.3
    assert round_pct(1.24) == 1.2
    assert round_pct(0.0) == 0.0


def test_decompose_empty_trajectory():
    bd = decompose([], ByteCountTokenizer())
    assert bd == TokenBreakdown(0, 0, 0, 0, 0)
    assert bd.total == 0


def test_decompose_rejects_untagged_spans():
    with pytest.raises(UntaggedSpanError):
        decompose([Span("x", "mystery", "prompt", 0)], ByteCountTokenizer())
    with pytest.raises(UntaggedSpanError):
        decompose([Span("x", "schema", "sideways", 0)], ByteCountTokenizer())


def test_decompose_single_turn_components():
    catalog, executor, agent = simple_run_pieces()
    record = run_trajectory("find", agent, executor, catalog, LoopConfig(format="json"))
    bd = decompose(record, ByteCountTokenizer())
    assert bd.schema_tokens > 0
    assert bd.call_tokens > 0
    assert bd.result_tokens > 0
    assert bd.schema_tokens + bd.call_tokens + bd.result_tokens <= bd.total
    assert bd.total == bd.prompt_tokens + bd.completion_tokens


def test_schema_tokens_shrink_on_tabular_catalog():
    """A catalog whose parameter blocks are table-shaped compresses in TOON."""
    from notation.agent import ScriptedAgent, ScriptTurn, TableExecutor, ToolSchema
    from notation.values import from_python
    from conftest import final_intent

    params = from_python(
        {
            "kind": "object",
            "fields": [
                {"name": "query", "type": "string", "doc": "search terms"},
                {"name": "limit", "type": "integer", "doc": "max results"},
                {"name": "strict", "type": "boolean", "doc": "exact match"},
            ],
        }
    )
    catalog = [ToolSchema("search", "Find documents.", params)]
    agent = ScriptedAgent([ScriptTurn(final_intent())])
    executor = TableExecutor({})
    tok = ByteCountTokenizer()
    runs = {}
    for fmt in ("json", "toon"):
        record = run_trajectory("t", agent, executor, catalog, LoopConfig(format=fmt))
        runs[fmt] = decompose(record, tok)
    assert runs["toon"].schema_tokens < runs["json"].schema_tokens


def test_delta_vs_self_is_zero():
    catalog, executor, agent = simple_run_pieces()
    record = run_trajectory("find", agent, executor, catalog, LoopConfig(format="json"))
    bd = decompose(record, ByteCountTokenizer())
    report = delta_vs_baseline(bd, bd)
    assert all(v == 0.0 for v in report.deltas.values())


def test_delta_arithmetic():
    base = TokenBreakdown(10, 10, 10, 70, 30)
    x = TokenBreakdown(5, 10, 10, 50, 23)
    report = delta_vs_baseline(x, base)
    assert report.deltas["schema_tokens"] == -50.0
    assert report.deltas["total"] == -27.0  # 100 -> 73


def test_delta_zero_baseline_is_na():
    base = TokenBreakdown(0, 10, 10, 50, 30)
    x = TokenBreakdown(5, 10, 10, 50, 30)
    report = delta_vs_baseline(x, base)
    assert report.deltas["schema_tokens"] is None
    assert report.deltas["total"] == 0.0


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=200))
def test_tokenizers_deterministic(text):
    for tok in (ByteCountTokenizer(), WordRegexTokenizer()):
        assert tok.count(text) == tok.count(text)
        assert tok.count(text) >= 0
