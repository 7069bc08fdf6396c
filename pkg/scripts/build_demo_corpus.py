#!/usr/bin/env python3
"""Build two demo corpora with opposite TRON behavior, then measure them.

`shared/` holds tool schemas with repeated parameter shapes: batching
amortizes one class table across the corpus. `singleton/` holds schemas
whose shapes are all unique: classing can only lose there. Run with no
arguments to write both under demo_corpora/ and print the measure tables.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from notation.cli import main as cli_main


def shared_shape_schema(i: int) -> dict:
    return {
        "name": f"tool{i}",
        "description": f"Utility number {i}; same parameter layout as its siblings.",
        "parameters": {
            "type": "object",
            "properties": {
                f"arg{i}": {"type": "string", "description": f"primary input {i}"},
                "limit": {"type": "integer", "description": "max results"},
                "strict": {"type": "boolean", "description": "exact matching"},
            },
        },
    }


def singleton_schema(i: int) -> dict:
    return {
        f"name_{i}": f"tool{i}",
        f"summary_{i}": "does one small thing",
        f"input_{i}": {
            f"kind_{i}": "object",
            f"field_{i}": {f"type_{i}": "string", f"doc_{i}": "the only argument"},
        },
    }


def write_corpus(root: Path, name: str, docs: list[dict]) -> Path:
    corpus = root / name
    corpus.mkdir(parents=True, exist_ok=True)
    for i, doc in enumerate(docs):
        (corpus / f"schema{i:02d}.json").write_text(json.dumps(doc) + "\n")
    return corpus


def main() -> int:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_corpora")
    shared = write_corpus(root, "shared", [shared_shape_schema(i) for i in range(8)])
    singleton = write_corpus(root, "singleton", [singleton_schema(i) for i in range(8)])
    for corpus in (shared, singleton):
        print(f"== {corpus} (TRON batched over the whole corpus)")
        report = root / f"{corpus.name}_report.json"
        code = cli_main(["measure", str(corpus), "--batch", "--out", str(report)])
        if code:
            return code
        print()
    print(f"reports written under {root}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
