"""Deciding identities between terms over all language and tree-language models.

Both terms are compiled to process graphs under the generic interpretation,
where every variable component is a fresh letter.  The identity holds in
every model exactly when the two graphs are simulation equivalent.  When it
fails, the graphs are pushed through the unary and grammar encodings to get
a context-free interpretation of the variables and a word that one side
generates and the other does not.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from . import encode as enc
from .semantics import WORD, LanguageMorphism, eval_term, word_text
from .simulation import failing_roots
from .synctree import (ProcessGraph, g_compose, g_dagger, g_dist, g_letter, g_sum, g_tuple,
                       g_zero)
from .term import (Comp, Dagger, Dist, Id, Letter, Signature, Sort, SortError, Sum, Tuple, Var,
                   Zero, desugar, free_vars, infer_sort, is_core, subterms)

__all__ = ["Verdict", "DecisionError", "generic_interp", "compile_term", "check_identity",
           "cfl_languages", "separates", "LHS_NOT_BELOW_RHS", "RHS_NOT_BELOW_LHS"]

LHS_NOT_BELOW_RHS = "lhs_not_below_rhs"
RHS_NOT_BELOW_LHS = "rhs_not_below_lhs"


class DecisionError(ValueError):
    pass


def generic_interp(variables: Mapping[str, Sort], reserved=()) -> Tuple[Dict[str, int], Dict[str, ProcessGraph]]:
    """Fresh letters ``v_1 .. v_k`` of rank ``m`` for each variable ``v: k -> m``."""
    alphabet: Dict[str, int] = {}
    graphs: Dict[str, ProcessGraph] = {}
    taken = set(reserved)
    for name in sorted(variables):
        s = variables[name]
        letters = [f"{name}_{i}" for i in range(1, s.source + 1)]
        for a in letters:
            if a in taken or a in alphabet:
                raise DecisionError(f"generic letter {a} clashes with a declared name")
            alphabet[a] = s.target
        graphs[name] = g_tuple([g_letter(a, s.target) for a in letters], s.target)
    return alphabet, graphs


def compile_term(t, interp: Mapping[str, ProcessGraph], sig: Optional[Signature] = None) -> ProcessGraph:
    """Structural evaluation into process graphs.  Letters not in ``interp``
    denote themselves (their rank is read from ``sig``)."""
    if not is_core(t):
        if sig is None:
            raise DecisionError("a signature is needed to desugar the term")
        t = desugar(t, sig)

    def go(t):
        if isinstance(t, Var):
            if t.name not in interp:
                raise DecisionError(f"no interpretation for variable {t.name}")
            return interp[t.name]
        if isinstance(t, Letter):
            if t.name in interp:
                return interp[t.name]
            if sig is None or t.name not in sig.letters:
                raise DecisionError(f"unknown letter {t.name}")
            return g_letter(t.name, sig.letters[t.name])
        if isinstance(t, Id):
            return g_tuple([g_dist(i, t.n) for i in range(1, t.n + 1)], t.n)
        if isinstance(t, Dist):
            return g_dist(t.i, t.n)
        if isinstance(t, Zero):
            return g_zero(t.n, t.p)
        if isinstance(t, Comp):
            return g_compose(go(t.left), go(t.right))
        if isinstance(t, Sum):
            return g_sum(go(t.left), go(t.right))
        if isinstance(t, Dagger):
            return g_dagger(go(t.body))
        if isinstance(t, Tuple):
            parts = [go(c) for c in t.items]
            return g_tuple(parts, parts[0].p)
        raise DecisionError(f"not a core term: {t!r}")

    return go(t)


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    sort: Sort
    direction: Optional[str] = None
    failing_root: Optional[int] = None
    generic_alphabet: Dict[str, int] = field(default_factory=dict)
    cfl_interpretation: Dict[str, enc.Cfg] = field(default_factory=dict)
    interpretation_sorts: Dict[str, Sort] = field(default_factory=dict)
    witness_word: Optional[tuple] = None
    left_grammar: Optional[enc.Cfg] = None
    right_grammar: Optional[enc.Cfg] = None

    def as_dict(self):
        if self.equivalent:
            return {"verdict": "equivalent"}
        return {
            "verdict": "not_equivalent",
            "direction": self.direction,
            "failing_root": self.failing_root,
            "witness_word": word_text(self.witness_word),
            "interpretation": {k: enc.cfg_text(g) for k, g in sorted(self.cfl_interpretation.items())},
            "generic_alphabet": dict(sorted(self.generic_alphabet.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=False)

    def witness_holds(self) -> bool:
        """The witness is generated by the larger side's grammar only."""
        if self.equivalent:
            return True
        i = self.failing_root - 1
        return (enc.cfg_member(self.left_grammar, self.witness_word, i)
                and not enc.cfg_member(self.right_grammar, self.witness_word, i))


def _letters_in(*terms):
    return sorted({s.name for t in terms for _, s in subterms(t) if isinstance(s, Letter)})


def check_identity(lhs, rhs, sig: Signature) -> Verdict:
    s, s2 = infer_sort(lhs, sig), infer_sort(rhs, sig)
    if s != s2:
        raise SortError(f"sides have different sorts {s} and {s2}")
    lhs, rhs = desugar(lhs, sig), desugar(rhs, sig)
    names = {name: sort for name, sort in free_vars(lhs, sig) | free_vars(rhs, sig)}
    alphabet, interp = generic_interp(names, reserved=set(sig.letters) | set(sig.variables))
    G, H = compile_term(lhs, interp, sig), compile_term(rhs, interp, sig)
    bad = failing_roots(G, H)
    direction = LHS_NOT_BELOW_RHS
    if not bad:
        bad = failing_roots(H, G)
        direction = RHS_NOT_BELOW_LHS
        G, H = H, G
    if not bad:
        return Verdict(True, s)
    root = bad[0]
    EG, EH = enc.encode_unary(G), enc.encode_unary(H)
    word = enc.distinguishing_word(EG, EH, root)
    letters = _letters_in(lhs, rhs)
    grammars, sorts = {}, {}
    for name, graph in interp.items():
        grammars[name] = enc.encode_cfg(enc.encode_unary(graph))
        sorts[name] = names[name]
    for a in letters:
        grammars[a] = enc.encode_cfg(enc.encode_unary(g_letter(a, sig.letters[a])))
        sorts[a] = Sort(1, sig.letters[a])
    full_alphabet = dict(alphabet)
    full_alphabet.update({a: sig.letters[a] for a in letters})
    return Verdict(False, s, direction, root, full_alphabet, grammars, sorts, word,
                   enc.encode_cfg(EG), enc.encode_cfg(EH))


def cfl_languages(verdict: Verdict, bound: int) -> Dict[str, LanguageMorphism]:
    """The reported grammars enumerated up to ``bound`` as word languages."""
    out = {}
    for name, cfg in verdict.cfl_interpretation.items():
        s = verdict.interpretation_sorts[name]
        out[name] = LanguageMorphism(WORD, s.source, s.target, enc.cfg_enumerate(cfg, bound))
    return out


def separates(verdict: Verdict, lhs, rhs, sig: Signature) -> bool:
    """Evaluate both terms under the reported interpretation, truncated at the
    witness length, and check that exactly the expected side has the witness."""
    w = verdict.witness_word
    bound = len(w)
    langs = cfl_languages(verdict, bound)
    a = eval_term(desugar(lhs, sig), langs, bound, WORD, sig).components[verdict.failing_root - 1]
    b = eval_term(desugar(rhs, sig), langs, bound, WORD, sig).components[verdict.failing_root - 1]
    if verdict.direction == RHS_NOT_BELOW_LHS:
        a, b = b, a
    return w in a and w not in b
