"""Show the overlapping chunker on documents of a few interesting lengths.

A 5000-token document yields windows at offsets 0, 1536, 3072; a document
shorter than one window passes through whole; a tail already covered by
the previous window produces no extra chunk.
"""

from medcorpus import chunk_document, tokenize


def show(n_tokens: int) -> None:
    tokens = [f"t{i}" for i in range(n_tokens)]
    chunks = chunk_document(tokens, size=2048, overlap=512, doc_id=f"doc{n_tokens}")
    spans = [(c.start_offset, c.start_offset + len(c.tokens)) for c in chunks]
    print(f"{n_tokens:>6} tokens -> {len(chunks)} chunk(s): {spans}")


def main() -> None:
    print("== window geometry (size 2048, overlap 512) ==")
    for n in (100, 2048, 2049, 2000, 3584, 5000, 10000):
        show(n)

    print("\n== mixed-script tokenization feeding the chunker ==")
    text = "insulin注射は一般的です and more plain words"
    print(f"  {text!r}")
    print(f"  -> {tokenize(text)}")


if __name__ == "__main__":
    main()
