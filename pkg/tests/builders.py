"""Corpus builders shared by the pipeline and acceptance tests."""
from __future__ import annotations

import random
from pathlib import Path

from codeanomaly.corpus import Corpus, build_corpus, file_facade_class
from codeanomaly.synthetic import PLANTED, generate_corpus, synthetic_listing


def pair_corpus(root: Path, trivial_inflation: int = 3, with_nested: bool = True) -> Corpus:
    """Ordinary corpus plus a trivial function with bloated bytecode and a source-heavy one with plain bytecode."""
    gen = generate_corpus(600, seed=4, planted=False)
    gen.files["gen/odd/trivial.kt"] = "package gen.odd\n\nfun tiny() = 1\n"
    if with_nested:
        gen.files["gen/odd/nested.kt"] = "package gen.odd\n\n" + PLANTED[4](random.Random(0)) + "\n"
    gen.write(root / "src")
    owners = [file_facade_class(rel, text.split()[1]) for rel, text in sorted(gen.files.items())]
    inflate = {"gen.odd.TrivialKt": trivial_inflation} if trivial_inflation else {}
    (root / "bc.txt").write_text(synthetic_listing(owners, 0, inflate))
    return build_corpus(src=str(root / "src"), bytecode=str(root / "bc.txt"))
