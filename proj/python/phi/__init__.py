"""Python bindings for the phi interpreter."""

from ._phi import ParseError, corpus_entries, default_corpus_dir, format, run, run_corpus

__all__ = ["ParseError", "corpus_entries", "default_corpus_dir", "format", "run", "run_corpus"]
