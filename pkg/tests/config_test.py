import pytest

CONFIG_TEXT = """
# 7x7 level-based foraging, team identification
domain = lbf
size = 7
set = team
agent = recbayes   # the agent under test
trials = 16
seed = 3
checkpoint = runs/lbf7_team/classifier.rbck
"""


def test_parsing():
    from recbayes.config import AgentKind, parse_config
    from recbayes.gridworld import DomainKind
    from recbayes.teammates import ExperimentSet

    config = parse_config(CONFIG_TEXT)
    assert config.domain == DomainKind.LBF
    assert config.size == 7
    assert config.experiment_set == ExperimentSet.TEAM
    assert config.agent == AgentKind.RECBAYES
    assert config.trials == 16
    assert config.seed == 3
    assert config.checkpoint == "runs/lbf7_team/classifier.rbck"
    assert config.policy_dir is None
    assert len(config.team_tasks()) == 3


@pytest.mark.parametrize(
    "text",
    [
        "colour = red",
        "size = 7\nsize = 9",
        "size = seven",
        "domain = chess",
        "agent = human",
        "set = teams",
        "this is not a key value line",
        "trials = 0",
        "max_steps = 1000",
        "agents = 5",
    ],
)
def test_invalid_config(text: str):
    from recbayes.config import parse_config
    from recbayes.errors import ConfigError

    with pytest.raises(ConfigError):
        parse_config(text)


def test_canonical_round_trip(tmp_path):
    from recbayes.config import load_config, parse_config

    config = parse_config(CONFIG_TEXT)
    assert parse_config(config.canonical()) == config

    config.save(tmp_path / "experiment.cfg")
    assert load_config(tmp_path / "experiment.cfg") == config


def test_overrides(tmp_path):
    from recbayes.config import AgentKind, load_config
    from recbayes.errors import ConfigError

    path = tmp_path / "experiment.cfg"
    path.write_text(CONFIG_TEXT)
    config = load_config(path, agent="random", trials=4, seed=None)
    assert config.agent == AgentKind.RANDOM
    assert config.trials == 4
    assert config.seed == 3
    assert config.replace(set="both").experiment_set.value == "both"

    with pytest.raises(ConfigError):
        config.replace(colour="red")


def test_digest_is_stable():
    from recbayes.config import ExperimentConfig, parse_config

    config = parse_config(CONFIG_TEXT)
    assert config.digest() == parse_config(config.canonical()).digest()
    assert config.digest() != config.replace(seed=4).digest()
    assert len(ExperimentConfig().digest()) == 64


def test_small_grids_are_allowed():
    from recbayes.config import parse_config

    config = parse_config("domain = pp\nsize = 3\nagents = 2")
    assert config.grid().allow_small
    assert config.grid().n_targets == 1
