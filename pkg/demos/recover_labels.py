"""Plant domain classes in a synthetic corpus and recover them by propagation.

Domains that are not in the seed table are only reachable through the words
written next to their links, so every correct label below was inferred.

    python demos/recover_labels.py [n_descriptions]
"""

import sys
import time
from collections import Counter

from altmon.cograph import accumulate_records, prune_words
from altmon.synth import recovery_corpus
from altmon.taxonomy import build_lexicon


def main(n=5000):
    corpus = recovery_corpus(n_descriptions=n, seed=0)
    t0 = time.perf_counter()
    graph = prune_words(accumulate_records(corpus.records).to_graph(), 30)
    lexicon = build_lexicon(graph)
    elapsed = time.perf_counter() - t0
    print(f"{len(corpus.records)} descriptions -> {len(graph.words)} words x {len(graph.domains)} domains "
          f"({elapsed:.2f}s, {lexicon.iterations} iterations)")

    confusion = Counter((want, lexicon.label(d)) for d, want in corpus.planted.items())
    hits = sum(v for (a, b), v in confusion.items() if a == b)
    print(f"recovered {hits}/{len(corpus.planted)} planted labels")
    for (want, got), v in sorted(confusion.items()):
        if want != got:
            print(f"  {want} labelled {got}: {v}")

    print("\nsample of inferred domains")
    for d in sorted(corpus.planted)[:8]:
        e = lexicon[d]
        scores = "  ".join(f"{s:.2f}" for s in e.scores)
        print(f"  {d:<22} {e.label}  ({scores})  {', '.join(w for w, _ in graph.top_words(d, 3))}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5000)
