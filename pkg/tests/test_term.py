import pytest
from hypothesis import given, settings

from grovecheck.semantics import WORD, eval_term
from grovecheck.term import (BaseMorphism, Comp, Dagger, Dist, Id, Letter, Oplus, Pair, ParseError,
                             Signature, Sort, SortError, Star, Sum, TermError, Tuple, Var, Zero,
                             desugar, free_vars, infer_sort, is_core, parse, parse_file, pretty,
                             sort_table, tokenize)

from .strategies import signed_terms

SIG = Signature({"sigma": 2, "a": 1, "nil": 0},
                {"f": Sort(1, 2), "g": Sort(1, 2), "h": Sort(2, 3), "k": Sort(2, 1), "u": Sort(1, 1)})


# --------------------------------------------------------------------------
# parsing

def test_parse_dagger_of_identity():
    assert parse("dg(id(1))", SIG) == Dagger(Id(1))


def test_parse_composition_with_tuple():
    assert parse("f . <g, pi(1,2)>", SIG) == Comp(Var("f"), Tuple((Var("g"), Dist(1, 2))))


def test_unknown_identifier():
    with pytest.raises(TermError, match="unknown identifier x"):
        parse("zero(2,3) + x", SIG)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse("f .\n  . g", SIG)
    assert (info.value.line, info.value.column) == (2, 3)


def test_dist_arity_checked():
    with pytest.raises(TermError):
        parse("pi(3,2)", SIG)
    with pytest.raises(TermError):
        parse("pi(0,2)", SIG)


def test_precedence_comp_oplus_sum():
    t = parse("a . a + a (+) a . a", SIG)
    assert t == Sum(Comp(Letter("a"), Letter("a")), Oplus(Letter("a"), Comp(Letter("a"), Letter("a"))))


def test_left_associative():
    assert parse("u . u . u", SIG) == Comp(Comp(Var("u"), Var("u")), Var("u"))
    assert parse("u + u + u", SIG) == Sum(Sum(Var("u"), Var("u")), Var("u"))


def test_comments_and_star():
    assert parse("st(u) -- trailing comment", SIG) == Star(Var("u"))


def test_tokens():
    kinds = [t.kind for t in tokenize("f (+) g -> 12")]
    assert kinds == ["name", "(+)", "name", "->", "nat", "eof"]


def test_parse_file():
    doc = parse_file("""
        alphabet { sigma:2, a:1, nil:0 }
        vars { f: 1 -> 2, g: 1 -> 2, k: 2 -> 1 }
        -- a comment
        def lhs = dg(f . <g, pi(1,2) + pi(2,2)>);
        def rhs = zero(1,0);
    """)
    assert doc.signature.letters == {"sigma": 2, "a": 1, "nil": 0}
    assert doc.signature.variables["k"] == Sort(2, 1)
    assert infer_sort(doc.term("lhs"), doc.signature) == Sort(1, 1)
    assert doc.term("rhs") == Zero(1, 0)


def test_parse_file_errors():
    with pytest.raises(ParseError):
        parse_file("vars { f: 1 -> }")
    with pytest.raises(ParseError):
        parse_file("alphabet { a:1, a:2 }")
    with pytest.raises(ParseError):
        parse_file("bogus { }")


def test_signature_rejects_clashes_and_bad_names():
    with pytest.raises(TermError):
        Signature({"f": 1}, {"f": Sort(1, 1)})
    with pytest.raises(TermError):
        Signature({"x1": 0})
    with pytest.raises(TermError):
        Signature({"dg": 1})


# --------------------------------------------------------------------------
# sorts

def test_dist_sort():
    assert infer_sort(Dist(2, 3), SIG) == Sort(1, 3)


def test_composition_sort():
    sig = Signature({}, {"f": Sort(1, 2), "g": Sort(2, 0)})
    assert infer_sort(Comp(Var("f"), Var("g")), sig) == Sort(1, 0)


def test_dagger_sorts():
    assert infer_sort(Dagger(Var("h")), SIG) == Sort(2, 1)
    sig = Signature({}, {"f": Sort(3, 2)})
    with pytest.raises(SortError, match="dagger needs target >= source"):
        infer_sort(Dagger(Var("f")), sig)


def test_sort_error_reports_path():
    with pytest.raises(SortError) as info:
        infer_sort(parse("f + <u, u> . k", SIG), SIG)
    assert info.value.path is not None


def test_tuple_sort():
    assert infer_sort(parse("<a, u, pi(1,1)>", SIG), SIG) == Sort(3, 1)
    assert infer_sort(parse("<k, a>", SIG), SIG) == Sort(3, 1)
    with pytest.raises(SortError):
        infer_sort(parse("<h, f>", SIG), SIG)


def test_pair_mixed_sources():
    sig = Signature({}, {"f": Sort(2, 3), "g": Sort(1, 3)})
    assert infer_sort(Pair(Var("f"), Var("g")), sig) == Sort(3, 3)


def test_sort_table_covers_all_subterms():
    t = parse("dg(f) . u + a", SIG)
    table = sort_table(t, SIG)
    assert table[()] == Sort(1, 1)
    assert table[(0, 0)] == Sort(1, 1)


# --------------------------------------------------------------------------
# desugaring

def test_star_of_identity_is_identity_in_languages():
    t = desugar(Star(Id(1)), SIG)
    assert isinstance(t, Dagger) and is_core(t)
    # 1^* = 1: the value is {x1}
    assert eval_term(t, {}, 6, WORD, SIG).components == (frozenset({(1,)}),)


def test_oplus_with_empty_zero():
    assert desugar(Oplus(Zero(0, 0), Var("f")), SIG) == Var("f")
    assert desugar(Oplus(Var("f"), Zero(0, 0)), SIG) == Var("f")


def test_pair_becomes_row_tuple():
    sig = Signature({}, {"f": Sort(2, 3), "g": Sort(1, 3)})
    t = desugar(Pair(Var("f"), Var("g")), sig)
    assert t == Tuple((Comp(Dist(1, 2), Var("f")), Comp(Dist(2, 2), Var("f")), Var("g")))


def test_oplus_shape():
    t = desugar(Oplus(Var("u"), Var("f")), SIG)
    # u . pi(1,3) paired with f . <pi(2,3), pi(3,3)>
    assert t == Tuple((Comp(Var("u"), Dist(1, 3)),
                       Comp(Var("f"), Tuple((Dist(2, 3), Dist(3, 3))))))


@settings(max_examples=150, deadline=None)
@given(signed_terms())
def test_desugar_keeps_sort_and_is_idempotent(data):
    sig, t, (n, p) = data
    core = desugar(t, sig)
    assert is_core(core)
    assert infer_sort(core, sig) == infer_sort(t, sig) == Sort(n, p)
    assert desugar(core, sig) == core


@settings(max_examples=150, deadline=None)
@given(signed_terms(sugar=False))
def test_pretty_parse_round_trip(data):
    sig, t, _ = data
    assert parse(pretty(t), sig) == t


@settings(max_examples=60, deadline=None)
@given(signed_terms())
def test_pretty_parse_round_trip_with_sugar(data):
    # pairing prints like tupling, so compare after desugaring
    sig, t, _ = data
    assert desugar(parse(pretty(t), sig), sig) == desugar(t, sig)


# --------------------------------------------------------------------------
# free variables and base morphisms

def test_free_vars():
    assert free_vars(Dagger(Var("h")), SIG) == {("h", Sort(2, 3))}
    assert free_vars(Letter("sigma"), SIG) == frozenset()
    assert free_vars(Sum(Var("u"), Var("u")), SIG) == {("u", Sort(1, 1))}


def test_base_morphism():
    rho = BaseMorphism((2, 1, 2), 2)
    assert rho.sort == Sort(3, 2)
    assert rho.then(BaseMorphism((2, 1), 2)).images == (1, 2, 1)
    assert infer_sort(rho.as_term(), SIG) == Sort(3, 2)
    with pytest.raises(ValueError):
        BaseMorphism((3,), 2)
