import json

import pytest

from hevfl.errors import ConfigInvalid
from hevfl.params import (
    PRESETS,
    CostModel,
    SchemeParams,
    cost_model_for,
    load_config,
    preset,
    semantic_params,
)


def test_preset_catalogue():
    assert set(PRESETS) == {"full-122", "full-156", "desk-1024"}
    p = preset("full-122")
    assert (p.ring_degree, p.slot_count, p.max_mult_level) == (8192, 4096, 1)
    assert preset("full-156").max_mult_level == 2
    d = preset("desk-1024")
    assert (d.ring_degree, d.slot_count) == (1024, 512)


def test_unknown_preset():
    with pytest.raises(ConfigInvalid):
        preset("full-9000")


def test_rlwe_ct_bytes_at_full_width():
    """One ciphertext is two ring elements of N coefficients at ceil(log q / 8)
    bytes each: 2 * 8192 * 16 = 262144."""
    cost = cost_model_for(preset("full-122"))
    assert cost.rlwe_ct_bytes == 2 * 8192 * 16 == 262144


def test_lwe_ct_bytes_desk():
    cost = cost_model_for(preset("desk-1024"))
    assert cost.lwe_ct_bytes == (1024 + 1) * 16 == 16400


def test_op_cost_is_a_dot_product():
    cost = CostModel()
    assert cost.op_cost(1, 1, 1, 1) == 1 + 2 + 30 + 10
    assert cost.op_cost(7, 8, 0, 6) == 7 + 16 + 60


def test_cost_model_ordering_constraint():
    # rotation must dominate hoisted rotation, which dominates multiplication
    with pytest.raises(ConfigInvalid):
        CostModel(cost_rot=5.0, cost_hst_rot=10.0)
    with pytest.raises(ConfigInvalid):
        CostModel(cost_mult=0.5, cost_add=1.0)


def test_scheme_params_validation():
    with pytest.raises(ConfigInvalid):
        SchemeParams(1000, 500, 122, 97, 2, 1)  # N not a power of two
    with pytest.raises(ConfigInvalid):
        SchemeParams(16, 4, 122, 97, 2, 1)  # slots must be N or N/2
    with pytest.raises(ConfigInvalid):
        SchemeParams(16, 8, 122, 2**41, 2, 1)  # modulus too wide for int64 paths


def test_with_slots_rescales_ring():
    p = semantic_params(64).with_slots(8)
    assert (p.ring_degree, p.slot_count) == (16, 8)


def test_semantic_params_defaults():
    p = semantic_params(8)
    assert p.slot_count == 8 and p.ring_degree == 16
    assert p.max_mult_level == 2


def test_load_config_roundtrip(tmp_path):
    cfg = {
        "cost_add": 1, "cost_mult": 2, "cost_rot": 30, "cost_hst_rot": 10,
        "N": 1024, "log_q": 122, "t": 274877908993, "delta": 1024,
    }
    path = tmp_path / "scheme.json"
    path.write_text(json.dumps(cfg))
    params, cost = load_config(path)
    assert params.slot_count == 512  # defaults to N/2
    assert cost.rlwe_ct_bytes == 2 * 1024 * 16


def test_load_config_rejects_missing_keys(tmp_path):
    path = tmp_path / "scheme.json"
    path.write_text(json.dumps({"N": 1024}))
    with pytest.raises(ConfigInvalid, match="missing"):
        load_config(path)
    with pytest.raises(ConfigInvalid, match="not found"):
        load_config(tmp_path / "nope.json")
    path.write_text("{not json")
    with pytest.raises(ConfigInvalid, match="JSON"):
        load_config(path)
