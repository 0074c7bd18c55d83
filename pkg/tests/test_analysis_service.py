from pathlib import Path

import pytest

from src.core.config import create_services, get_config
from src.core.errors import SpecFormatError
from src.pushdown.stack import format_stack
from src.pushdown.system import Configuration
from src.services.analysis_service import AnalysisService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CYCLE = FIXTURES / "cycle.cps"
SUBRETURNS_STACK = "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1) a]"


class TestAnalysisService:
    @pytest.fixture
    def service(self):
        """Create an AnalysisService with default limits."""
        return AnalysisService()

    def test_init(self):
        """Test default limits."""
        service = AnalysisService()
        assert service.max_configs == 20000
        assert service.default_threshold == 1
        assert service.npt_max_length == 8

    def test_load_text_is_cached(self, service):
        """Parsing the same text twice gives the same system."""
        text = CYCLE.read_text(encoding="utf-8")

        first = service.load(text)

        assert service.load(text) is first
        assert first.labels == ("Cl", "A", "A'", "P", "Co")

    def test_load_path(self, service):
        """Paths ending in .cps are read from disk."""
        cps = service.load(str(CYCLE))
        assert cps.name == "cycle"
        assert service.load(cps) is cps

    def test_load_malformed(self, service):
        """Format errors are not wrapped."""
        with pytest.raises(SpecFormatError):
            service.load("not a system\n")

    def test_configuration_defaults(self, service):
        """Missing state and stack give the initial configuration."""
        cps = service.load(CYCLE)

        assert service.configuration(cps, None, None) == cps.initial_configuration()
        assert service.configuration(cps, "2", None) == Configuration("2", cps.initial_configuration().stack)

    def test_explore(self, service):
        """Two steps reach four configurations."""
        result = service.explore(CYCLE, 2)

        rows = service.configurations(result)
        assert len(rows) == 4
        assert rows[0] == {"state": "0", "stack": "[⊥]", "depth": 0}

    def test_explore_wraps_failures(self, service):
        """Unexpected failures are wrapped with the operation name."""
        with pytest.raises(RuntimeError) as exc_info:
            service.explore(CYCLE, -1)

        assert "Failed to explore" in str(exc_info.value)

    def test_encode_decode(self, service):
        """A decoded encoding gives back the configuration."""
        t = service.encode(CYCLE, "2", "[⊥]:[⊥ (a,2,1)]")

        c = service.decode(t, CYCLE)

        assert c.state == "2"
        assert format_stack(c.stack) == "[⊥]:[⊥ (a,2,1)]"
        assert service.render_tree(t).startswith("cpg2kit-format 1\ntree\n")

    def test_milestones(self, service):
        """Every milestone of a stack is listed once."""
        nodes = service.milestones(stack="[⊥ a]:[⊥ a]")

        assert list(nodes.values()) == ["[⊥]", "[⊥ a]", "[⊥ a]:[⊥ a]"]

    def test_count_returns(self, service):
        """Six returns leave the subreturns stack from q0."""
        counts = service.count_returns(FIXTURES / "subreturns.cps", SUBRETURNS_STACK, 10)

        assert sum(counts("q0", q) for q in counts.successors("q0")) == 6

    def test_count_loops_kind(self, service):
        """Unknown loop kinds are rejected."""
        with pytest.raises(ValueError):
            service.count_loops(CYCLE, "[⊥]:[⊥]", 2, "sideways")

    def test_reach(self, service):
        """Reachability on explicit configurations."""
        cps = service.load(CYCLE)
        source = service.configuration(cps, None, None)

        assert service.reach(cps, source, service.configuration(cps, "2", "[⊥]:[⊥]"))
        assert not service.reach(cps, source, service.configuration(cps, "1", "[⊥]"))

    def test_check(self, service):
        """A reach-free sentence is decided without a bound."""
        verdict = service.check(CYCLE, "(exists x (exists y (edge Cl x y)))")

        assert verdict.value is True
        assert verdict.bound is None

    def test_npt_check(self, service):
        """The report carries the verdict, the system size and the cut."""
        result = service.npt_check(FIXTURES / "npt_example.cps", "(exists x (exists y (jump x y)))", 6)

        assert result["value"] is True
        assert result["max_length"] == 6
        assert result["size"] > 0
        assert isinstance(result["truncated"], bool)


class TestCreateServices:
    def test_from_config(self):
        """Test the service takes its limits from the config."""
        config = dict(get_config(), max_configs=77)

        service = create_services(config)

        assert service.max_configs == 77

    @pytest.mark.parametrize("key", ["max_configs", "sim_horizon"])
    def test_invalid_limits(self, key):
        """Test nonpositive limits are rejected."""
        config = dict(get_config(), **{key: 0})

        with pytest.raises(ValueError):
            create_services(config)
