"""Decide identities of regular language and tree-language expressions.

Terms over a many-sorted signature are compiled to process graphs; two terms
are equal in every language model exactly when their graphs simulate each
other.  Failing identities come with a context-free counterexample.
"""
from .decide import Verdict, check_identity, compile_term, generic_interp
from .simulation import bisim_equiv, sim_equiv, simulates
from .synctree import ProcessGraph
from .term import Signature, Sort, parse, parse_file

__all__ = [
    "Verdict", "check_identity", "compile_term", "generic_interp",
    "bisim_equiv", "sim_equiv", "simulates", "ProcessGraph",
    "Signature", "Sort", "parse", "parse_file",
]
__version__ = "0.1.0"
