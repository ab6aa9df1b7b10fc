import numpy as np
import pytest
import torch

from gridpath_neural.data import model_input, normalize_target
from gridpath_neural.model import ModelConfig, PathPredictor

TINY = ModelConfig(base_width=4, stage_widths=(4,), blocks_per_stage=1,
                   transformer_blocks=1, heads=1, ff_dim=8, pos_grid=4)


class TestShapes:
    @pytest.mark.parametrize("size", [32, 64, 128])
    def test_output_matches_input_dims(self, size):
        torch.manual_seed(0)
        model = PathPredictor(ModelConfig())
        x = torch.rand(1, 2, size, size)
        with torch.no_grad():
            y = model(x)
        assert y.shape == (1, 1, size, size)

    def test_indivisible_size_rejected(self):
        model = PathPredictor(ModelConfig())
        with pytest.raises(ValueError):
            model(torch.rand(1, 2, 30, 30))

    def test_output_ranges(self):
        torch.manual_seed(1)
        x = torch.rand(2, 2, 32, 32)
        with torch.no_grad():
            y_sig = PathPredictor(ModelConfig(output="sigmoid"))(x)
            y_sp = PathPredictor(ModelConfig(output="softplus"))(x)
        assert 0.0 <= float(y_sig.min()) and float(y_sig.max()) <= 1.0
        assert float(y_sp.min()) >= 0.0

    def test_no_transformer_ablation(self):
        torch.manual_seed(2)
        full = PathPredictor(ModelConfig(use_transformer=True))
        ablated = PathPredictor(ModelConfig(use_transformer=False))
        n_full = sum(p.numel() for p in full.parameters())
        n_abl = sum(p.numel() for p in ablated.parameters())
        assert n_abl < n_full
        x = torch.rand(1, 2, 32, 32)
        with torch.no_grad():
            assert ablated(x).shape == (1, 1, 32, 32)


class TestGradients:
    def test_finite_difference_agreement(self):
        # tiny double-precision model; all layers are smooth (GELU, GroupNorm,
        # sigmoid), so central differences converge
        torch.manual_seed(3)
        model = PathPredictor(TINY).double()
        x = torch.rand(1, 2, 8, 8, dtype=torch.float64, requires_grad=True)
        target = torch.rand(1, 1, 8, 8, dtype=torch.float64)
        loss = ((model(x) - target) ** 2).mean()
        loss.backward()
        grad = x.grad.detach().clone()

        eps = 1e-6
        rng = np.random.default_rng(4)
        checked = 0
        for _ in range(12):
            c = int(rng.integers(0, 2))
            r = int(rng.integers(0, 8))
            col = int(rng.integers(0, 8))
            if abs(grad[0, c, r, col]) < 1e-8:
                continue
            with torch.no_grad():
                xp = x.detach().clone()
                xp[0, c, r, col] += eps
                xm = x.detach().clone()
                xm[0, c, r, col] -= eps
                lp = ((model(xp) - target) ** 2).mean()
                lm = ((model(xm) - target) ** 2).mean()
            fd = (lp - lm) / (2 * eps)
            rel = abs(fd - grad[0, c, r, col]) / max(abs(fd), abs(grad[0, c, r, col]))
            assert rel < 1e-3, (fd, grad[0, c, r, col])
            checked += 1
        assert checked >= 5

    def test_autograd_gradcheck_tiny(self):
        torch.manual_seed(5)
        model = PathPredictor(TINY).double()
        x = torch.rand(1, 2, 8, 8, dtype=torch.float64, requires_grad=True)
        assert torch.autograd.gradcheck(
            lambda inp: model(inp).sum(), (x,), eps=1e-6, atol=1e-4)


class TestDeterminism:
    def test_eval_forward_deterministic(self):
        torch.manual_seed(6)
        model = PathPredictor(ModelConfig(base_width=8, stage_widths=(8, 8),
                                          transformer_blocks=1, heads=2,
                                          ff_dim=16))
        model.eval()
        x = torch.rand(1, 2, 32, 32)
        with torch.no_grad():
            a = model(x)
            b = model(x)
        assert torch.equal(a, b)


class TestDataPlumbing:
    def test_model_input_channels(self):
        blocked = np.zeros((8, 8), dtype=bool)
        blocked[3, 3] = True
        x = model_input(blocked, (0, 0), (7, 7), "pp")
        assert x.shape == (2, 8, 8)
        assert x[0, 3, 3] == 1.0
        assert int(x[1].sum()) == 2          # start and goal marked
        x_cf = model_input(blocked, (0, 0), (7, 7), "cf")
        assert int(x_cf[1].sum()) == 1       # goal only
        assert x_cf[1, 7, 7] == 1.0

    def test_abs_normalization_masks_sentinels(self):
        values = np.array([[0.0, 12.0], [1e12, 3.0]], dtype=np.float32)
        vals, mask = normalize_target("abs", values, 2, 2)
        assert mask[1, 0] == 0.0
        assert vals[1, 0] == 0.0
        assert vals[0, 1] == pytest.approx(12.0 / 4.0)

    def test_cf_passthrough(self):
        values = np.array([[0.5, 1.0]], dtype=np.float32)
        vals, mask = normalize_target("cf", values, 1, 2)
        assert np.array_equal(vals, values)
        assert mask.all()
