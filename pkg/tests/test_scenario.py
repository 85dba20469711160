import json

import pytest

from cluster_consensus import ConfigError, ScenarioSpec, parse_config_text


def make_spec(**overrides):
    base = dict(family="ring", cluster_sizes=(5, 5), gamma=0.5, beta=0.2,
                tau=1, seed=3, max_iters=50)
    base.update(overrides)
    return ScenarioSpec(**base)


def test_defaults():
    spec = make_spec()
    assert spec.tau_intra == 0
    assert spec.d == 1
    assert spec.leader_graph == "line"
    assert spec.threshold == pytest.approx(1e-3)
    assert spec.total_nodes == 10
    assert spec.cluster_count == 2


def test_cluster_sizes_become_tuple():
    spec = make_spec(cluster_sizes=[5, 5])
    assert spec.cluster_sizes == (5, 5)


@pytest.mark.parametrize("field,value", [
    ("gamma", 0.0),
    ("gamma", 1.0),
    ("beta", 0.0),
    ("beta", 1.5),
    ("tau", -1),
    ("tau_intra", -2),
    ("max_iters", -1),
    ("d", 0),
    ("threshold", 0.0),
    ("cluster_sizes", ()),
    ("cluster_sizes", (5, 0)),
    ("family", "torus"),
    ("leader_graph", "star"),
    ("record_stride", -1),
])
def test_rejects_bad_field(field, value):
    with pytest.raises(ConfigError) as err:
        make_spec(**{field: value})
    assert field.split("_")[0] in str(err.value) or field in str(err.value)


def test_geometric_requires_radius():
    with pytest.raises(ConfigError):
        make_spec(family="geometric")
    make_spec(family="geometric", radius=0.4)   # fine


def test_explicit_requires_edges():
    with pytest.raises(ConfigError):
        make_spec(family="explicit")


def test_init_range_ordering():
    with pytest.raises(ConfigError):
        make_spec(init_low=2.0, init_high=-2.0)


def test_round_trip_through_json():
    spec = make_spec(family="geometric", radius=0.35, tau_intra=2, d=3)
    again = ScenarioSpec.from_dict(json.loads(spec.to_json()))
    assert again == spec


def test_from_dict_rejects_unknown_keys():
    data = make_spec().to_dict()
    data["extra_knob"] = 1
    with pytest.raises(ConfigError) as err:
        ScenarioSpec.from_dict(data)
    assert "extra_knob" in str(err.value)


def test_from_dict_reports_missing_keys():
    data = make_spec().to_dict()
    del data["gamma"]
    with pytest.raises(ConfigError) as err:
        ScenarioSpec.from_dict(data)
    assert "gamma" in str(err.value)


def test_replace_keeps_other_fields():
    spec = make_spec()
    other = spec.replace(tau=9)
    assert other.tau == 9
    assert other.gamma == spec.gamma
    assert spec.tau == 1


def test_fingerprint_stable_and_sensitive():
    a = make_spec()
    assert a.fingerprint() == make_spec().fingerprint()
    assert a.fingerprint() != a.replace(seed=4).fingerprint()
    assert len(a.fingerprint()) == 64


def test_fingerprint_ignores_representation():
    # ints that arrive as floats from JSON should not change identity
    a = make_spec(gamma=0.5)
    b = make_spec(gamma=1 / 2)
    assert a.fingerprint() == b.fingerprint()


def test_parse_config_text_round_trip():
    spec = make_spec()
    assert parse_config_text(spec.to_json()) == spec


def test_parse_config_text_reports_location():
    with pytest.raises(ConfigError) as err:
        parse_config_text('{"family": "ring",\n  "cluster_sizes": [5 5]}')
    msg = str(err.value)
    assert "line 2" in msg


def test_parse_config_text_rejects_non_object():
    with pytest.raises(ConfigError):
        parse_config_text("[1, 2, 3]")
