"""Prompt-based text detoxification: example selection, prompt rendering,
reference-free scoring, and ensemble reranking."""

try:
    from ._gptdetox import *  # noqa: F401,F403
    from ._gptdetox import __doc__ as _core_doc  # noqa: F401
except ImportError:  # development tree: module built next to the package
    from _gptdetox import *  # noqa: F401,F403
