from pathlib import Path

import pytest

from src.core.errors import FormulaSyntaxError, PreconditionError
from src.logic.checker import BOUNDED, bounded_universe, check_sentence, is_existential_positive, witnesses
from src.logic.compiler import compile_formula, satisfies
from src.logic.formula import (
    And,
    Const,
    Edge,
    Eq,
    Exists,
    ModCount,
    Not,
    Reach,
    free_vars,
    is_sentence,
    languages,
    quantifier_rank,
    uses_reach,
)
from src.logic.parser import parse_formula
from src.pushdown.loader import load_spec
from src.pushdown.stack import parse_stack
from src.pushdown.system import Configuration
from src.reachability.dfa import load_dfa

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def config(state: str, stack: str) -> Configuration:
    return Configuration(state, parse_stack(stack))


@pytest.fixture
def cycle():
    return load_spec(FIXTURES / "cycle.cps")


@pytest.fixture
def chain3():
    return load_spec(FIXTURES / "chain3.cps")


class TestParser:
    """Test the s-expression formula syntax"""

    def test_parse_atoms(self):
        """Atoms parse to their node types"""
        assert parse_formula("(= x y)") == Eq("x", "y")
        assert parse_formula("(edge Cl x y)") == Edge("Cl", "x", "y")
        assert parse_formula("(reach x y)") == Reach("x", "y")
        assert parse_formula("true") == Const(True)

    def test_nary_connectives(self):
        """Three conjuncts nest to the left"""
        phi = parse_formula("(and true false (= x x))")

        assert phi == And(And(Const(True), Const(False)), Eq("x", "x"))

    def test_modcount(self):
        """The counting quantifier carries residue and modulus"""
        phi = parse_formula("(modcount 1 2 x (= x x))")

        assert phi == ModCount(1, 2, "x", Eq("x", "x"))

    @pytest.mark.parametrize(
        "text",
        [
            "(exists x (exists y (edge Cl x y)))",
            "(forall x (not (reachL L x x)))",
            "(infinite x (or (jump x x) (= x x)))",
            "(modcount 0 3 x true)",
        ],
    )
    def test_format_round_trip(self, text):
        """Formatting a parsed formula gives back the text"""
        assert str(parse_formula(text)) == text

    @pytest.mark.parametrize(
        "text, position",
        [
            ("(= x", 4),
            ("(foo x y)", 5),
            ("(= x y) extra", 8),
            ("(exists and (= x x))", 8),
            ("(modcount a 2 x true)", 10),
        ],
    )
    def test_syntax_errors(self, text, position):
        """Errors report the offending position"""
        with pytest.raises(FormulaSyntaxError) as exc_info:
            parse_formula(text)

        assert exc_info.value.position == position

    def test_zero_modulus(self):
        """The modulus must be positive"""
        with pytest.raises(FormulaSyntaxError):
            parse_formula("(modcount 0 0 x true)")


class TestFormula:
    """Test syntactic queries on formulas"""

    def test_free_vars(self):
        """Free variables come in order of first occurrence"""
        phi = parse_formula("(and (edge A y x) (exists y (= y z)))")

        assert free_vars(phi) == ["y", "x", "z"]
        assert not is_sentence(phi)

    def test_quantifier_rank(self):
        """Nested quantifiers count, parallel ones do not"""
        phi = parse_formula("(and (exists x (exists y (= x y))) (forall z (= z z)))")

        assert quantifier_rank(phi) == 2

    def test_reach_queries(self):
        """Languages are collected from regular reachability atoms"""
        phi = parse_formula("(exists x (or (reachL B x x) (reachL A x x)))")

        assert uses_reach(phi)
        assert languages(phi) == ["A", "B"]
        assert not uses_reach(parse_formula("(exists x (= x x))"))

    def test_existential_positive(self):
        """Negations and universal quantifiers break existential positivity"""
        assert is_existential_positive(parse_formula("(exists x (reach x x))"))
        assert not is_existential_positive(parse_formula("(exists x (not (reach x x)))"))
        assert not is_existential_positive(Exists("x", Not(Eq("x", "x"))))


class TestCompiler:
    """Test compilation of formulas into tree automata"""

    def test_edge_relation(self, cycle):
        """A compiled edge atom holds exactly for labelled steps"""
        compiled = compile_formula(cycle, parse_formula("(edge Cl x y)"))

        assert compiled.variables == ("x", "y")
        assert satisfies(compiled, {"x": config("0", "[⊥]"), "y": config("1", "[⊥]:[⊥]")})
        assert not satisfies(compiled, {"x": config("1", "[⊥]:[⊥]"), "y": config("0", "[⊥]")})

    def test_existential_projection(self, cycle):
        """Projecting the target keeps the sources of the label"""
        compiled = compile_formula(cycle, parse_formula("(exists y (edge P x y))"))

        assert compiled.variables == ("x",)
        assert satisfies(compiled, {"x": config("2", "[⊥]:[⊥ (a,2,1)]")})
        assert not satisfies(compiled, {"x": config("0", "[⊥]")})

    def test_missing_assignment(self, cycle):
        """Every free variable needs a value"""
        compiled = compile_formula(cycle, parse_formula("(edge Cl x y)"))

        with pytest.raises(PreconditionError):
            satisfies(compiled, {"x": config("0", "[⊥]")})

    def test_reach_not_compiled(self, cycle):
        """Reachability atoms have no automaton"""
        with pytest.raises(PreconditionError) as exc_info:
            compile_formula(cycle, parse_formula("(reach x y)"))

        assert exc_info.value.clause == "reach-free"


class TestChecker:
    """Test deciding sentences on configuration graphs"""

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("(exists x (exists y (edge Cl x y)))", True),
            ("(exists x (edge P x x))", False),
            ("(forall x (exists y (edge Cl x y)))", False),
            ("(exists x (exists y (and (edge Cl x y) (edge A y x))))", False),
            ("(exists x (exists y (and (edge A' x y) (exists z (edge Co y z)))))", True),
        ],
    )
    def test_reach_free_sentences(self, cycle, text, expected):
        """Reach-free sentences are decided by automata"""
        verdict = check_sentence(cycle, parse_formula(text))

        assert verdict.value is expected
        assert verdict.bound is None

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("(modcount 0 3 x true)", True),
            ("(modcount 0 2 x true)", False),
            ("(infinite x true)", False),
        ],
    )
    def test_counting_on_finite_graph(self, chain3, text, expected):
        """Counting quantifiers see exactly three configurations"""
        assert check_sentence(chain3, parse_formula(text)).value is expected

    def test_infinitely_many_configurations(self, cycle):
        """Repeated pushes give infinitely many reachable configurations"""
        assert check_sentence(cycle, parse_formula("(infinite x true)")).value is True

    def test_bounded_universe(self, chain3):
        """A large enough bound covers the whole reachable set"""
        universe = bounded_universe(chain3, 6)

        assert set(universe) == {config("0", "[⊥]"), config("1", "[⊥]:[⊥]"), config("2", "[⊥]")}

    def test_reach_sentence_is_bounded(self, chain3):
        """Sentences with reachability are evaluated over the bounded universe"""
        verdict = check_sentence(chain3, parse_formula("(forall x (forall y (or (reach x y) (reach y x))))"), bound=6)

        assert verdict.value is True
        assert verdict.exactness == BOUNDED
        assert verdict.bound == 6
        assert not verdict.conclusive

    def test_existential_witness_is_conclusive(self, chain3):
        """A found witness of an existential-positive sentence settles it"""
        verdict = check_sentence(chain3, parse_formula("(exists x (exists y (reach x y)))"), bound=6)

        assert verdict.value is True
        assert verdict.conclusive
        assert verdict.to_json()["conclusive"] is True

    def test_reach_needs_bound(self, chain3):
        """Reachability atoms without a bound are refused"""
        with pytest.raises(PreconditionError) as exc_info:
            check_sentence(chain3, parse_formula("(exists x (reach x x))"))

        assert exc_info.value.clause == "bound"

    def test_regular_reach(self, cycle):
        """Named languages answer regular reachability atoms"""
        phi = parse_formula("(exists x (exists y (reachL pop x y)))")
        dfa = load_dfa(FIXTURES / "ends_with_pop.json")

        verdict = check_sentence(cycle, phi, bound=4, languages={"pop": dfa})

        assert verdict.value is True

    def test_unknown_language(self, cycle):
        """An unregistered language name is a precondition failure"""
        with pytest.raises(PreconditionError):
            check_sentence(cycle, parse_formula("(exists x (reachL nope x x))"), bound=3)

    @pytest.mark.parametrize("text", ["(edge Cl x y)", "(exists x (jump x x))"])
    def test_rejected_sentences(self, cycle, text):
        """Open formulas and jump atoms are not checked on configuration graphs"""
        with pytest.raises(PreconditionError):
            check_sentence(cycle, parse_formula(text))

    def test_witnesses(self, chain3):
        """The only Cl edge is found as a witness"""
        phi = parse_formula("(exists x (exists y (edge Cl x y)))")

        found = list(witnesses(chain3, phi, 6))

        assert found == [{"x": config("0", "[⊥]"), "y": config("1", "[⊥]:[⊥]")}]
