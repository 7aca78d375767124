import json

import pytest

from diagbn.network import build_network

# Frozen reference numbers for the broken-vase fixture with v observed true,
# verified by hand against the four enumerated joint weights:
#   (e,b) = (1,0): 0.01 * 0.98 * 0.9001   = 0.00882098
#   (0,1): 0.99 * 0.02 * 0.8002           = 0.01584396
#   (1,1): 0.01 * 0.02 * 0.98002          = 0.000196004
#   (0,0): 0.99 * 0.98 * 0.001            = 0.0009702
VASE_WEIGHTS = {
    (1, 0): 0.00882098,
    (0, 1): 0.01584396,
    (1, 1): 0.000196004,
    (0, 0): 0.0009702,
}
VASE_NORMALIZER = 0.025831144  # P(v = 1), the sum of the four weights
VASE_P_E = 0.3490741254045891  # P(e=1 | v=1)
VASE_P_B = 0.6209544571467682  # P(b=1 | v=1)
VASE_P_E_GIVEN_B0 = 0.9009108197377641  # P(e=1 | b=0, v=1)
VASE_BLOCK_DIST = {  # transition target over (e,b) given v=1
    (1, 0): 0.34148623072985074,
    (0, 1): 0.6133665624720299,
    (1, 1): 0.00758789467473837,
    (0, 0): 0.03755931212338098,
}
VASE_SWAP_GIBBS = 0.6423676684394936  # P(move) from (1,0) to (0,1), Gibbs rule
VASE_SWAP_RATIO = 1.7961677727418044  # weight ratio (0,1)/(1,0)


@pytest.fixture
def vase():
    return build_network(
        [("e", "model", 0.01), ("b", "model", 0.02), ("v", "sensory", 0.001)],
        [("e", "v", 0.9), ("b", "v", 0.8)],
    )


@pytest.fixture
def vase_files(tmp_path, vase):
    from diagbn.network import serialize_network

    net_path = tmp_path / "vase.json"
    net_path.write_text(serialize_network(vase))
    ev_path = tmp_path / "ev.json"
    ev_path.write_text(json.dumps({"v": True}) + "\n")
    return str(net_path), str(ev_path)
