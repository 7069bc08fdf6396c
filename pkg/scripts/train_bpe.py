#!/usr/bin/env python3
"""Train a tiny byte-level BPE vocabulary on a text corpus.

Emits vocab.json and merges.txt in the plain-text interchange layout the
token meter loads, so `notation measure --tokenizer bpe --vocab <dir>`
has something real to chew on. Ties break lexicographically, so training
is deterministic for a fixed corpus.
"""

import json
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from notation.tokens import _bytes_to_unicode


def train(texts: list[str], num_merges: int) -> tuple[dict[str, int], list[tuple[str, str]]]:
    byte_map = _bytes_to_unicode()
    words = [[byte_map[b] for b in text.encode("utf-8")] for text in texts]
    merges: list[tuple[str, str]] = []
    for _ in range(num_merges):
        pairs = Counter()
        for word in words:
            for a, b in zip(word, word[1:]):
                pairs[(a, b)] += 1
        if not pairs:
            break
        best_count = max(pairs.values())
        if best_count < 2:
            break
        best = min(pair for pair, n in pairs.items() if n == best_count)
        merges.append(best)
        merged = best[0] + best[1]
        for word in words:
            i = 0
            while i < len(word) - 1:
                if word[i] == best[0] and word[i + 1] == best[1]:
                    word[i : i + 2] = [merged]
                else:
                    i += 1
    vocab: dict[str, int] = {}
    for ch in byte_map.values():
        vocab[ch] = len(vocab)
    for a, b in merges:
        token = a + b
        if token not in vocab:
            vocab[token] = len(vocab)
    return vocab, merges


def main() -> int:
    corpus_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("fixtures/bpe")
    num_merges = int(sys.argv[3]) if len(sys.argv) > 3 else 200
    texts = [p.read_text(encoding="utf-8") for p in sorted(corpus_dir.glob("*.*")) if p.is_file()]
    if not texts:
        print(f"no corpus files in {corpus_dir}", file=sys.stderr)
        return 2
    vocab, merges = train(texts, num_merges)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "vocab.json").write_text(json.dumps(vocab, ensure_ascii=False, indent=0) + "\n")
    (out_dir / "merges.txt").write_text(
        "#version: mini\n" + "\n".join(f"{a} {b}" for a, b in merges) + "\n"
    )
    print(f"trained {len(merges)} merges over {len(texts)} files -> {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
