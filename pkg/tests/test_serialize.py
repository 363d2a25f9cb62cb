import numpy as np
import pytest

from chi2nn.baseline import BpnnNetwork, init_bpnn
from chi2nn.network import Chi2Network, init_network
from chi2nn.serialize import load_model, save_model


class TestRoundTrip:
    def test_chi2_network_exact(self, tmp_path):
        net = init_network(3, 7, seed=123)
        path = tmp_path / "model.txt"
        save_model(net, path)
        loaded = load_model(path)
        assert isinstance(loaded, Chi2Network)
        assert np.array_equal(loaded.weights_in, net.weights_in)
        assert np.array_equal(loaded.bias_hidden, net.bias_hidden)
        assert np.array_equal(loaded.weights_out, net.weights_out)
        assert loaded.bias_out == net.bias_out

    def test_baseline_network_exact(self, tmp_path):
        net = init_bpnn(2, 5, seed=9)
        path = tmp_path / "model.txt"
        save_model(net, path)
        loaded = load_model(path)
        assert isinstance(loaded, BpnnNetwork)
        assert np.array_equal(loaded.weights_in, net.weights_in)
        assert loaded.bias_out == net.bias_out

    def test_header_records_kind_and_shape(self, tmp_path):
        net = init_network(2, 4, seed=1)
        path = tmp_path / "model.txt"
        save_model(net, path)
        assert path.read_text().splitlines()[0] == "chi2nn 2 4"


class TestErrors:
    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("svm 2 2\n" + "\n".join(["0.0"] * 9) + "\n")
        with pytest.raises(ValueError):
            load_model(path)

    def test_wrong_parameter_count(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("chi2nn 2 2\n0.0\n0.0\n")
        with pytest.raises(ValueError):
            load_model(path)

    def test_unserializable_type(self, tmp_path):
        with pytest.raises(TypeError):
            save_model(object(), tmp_path / "model.txt")
