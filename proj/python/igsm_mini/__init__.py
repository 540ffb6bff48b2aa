"""Synthetic-math data generation, difficulty curation, tiny-transformer
training, and distribution-shift bound arithmetic.

The heavy lifting lives in the compiled ``_igsm`` extension; this package
re-exports its public surface.
"""

try:
    from ._igsm import *  # noqa: F401,F403
    from ._igsm import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree test runs put the extension on sys.path directly
    from _igsm import *  # noqa: F401,F403

__all__ = [
    "ProblemInstance",
    "Tokenizer",
    "Model",
    "DiscreteDistribution",
    "generate_dataset",
    "verify_instance",
    "read_jsonl",
    "write_jsonl",
    "nested_sample",
    "extract_answer",
    "target_edges",
    "max_admissible_edges",
    "pac_bayes_term",
    "tv_distance",
    "kl_distributions",
    "kl_weight_proxy",
]
