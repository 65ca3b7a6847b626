"""Joint states vs (state, channel) pairs, and the inference theorem.

pair builds a joint from a prior and a unital channel; project and
extract invert it. Conditioning the joint on one-sided evidence and
marginalizing must match the channel route through the extracted pair.
"""

import numpy as np
import pytest

from qbayes import classical as cl
from qbayes import correspond as co
from qbayes import quantum as qu
from qbayes.classical import Dist, FuzzyPred, Space, StochChannel
from qbayes.errors import DimensionError, SingularMarginalError
from qbayes.quantum import Effect, QChannel, QState


def _ginibre(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def _random_state(rng, n):
    g = _ginibre(rng, n, n)
    m = g @ g.conj().T
    return QState(m / np.trace(m).real, (n,))


def _random_effect(rng, n):
    g = _ginibre(rng, n, n)
    m = g @ g.conj().T
    return Effect(rng.uniform() * m / np.linalg.norm(m, 2), (n,))


def _random_unital_channel(rng, n, m):
    q, _ = np.linalg.qr(_ginibre(rng, m * m, n))
    kraus = [q[i * m : (i + 1) * m, :] for i in range(m)]
    return QChannel.from_kraus(kraus, (n,), (m,))


class TestPair:
    def test_maximally_mixed_with_identity_gives_cup(self):
        got = co.pair(QState.maximally_mixed((3,)), QChannel.identity((3,)))
        np.testing.assert_allclose(got.mat, qu.cup(3).mat, atol=1e-12)

    def test_scalar_prior_reads_off_the_channel(self):
        """With a 1-dim prior the joint entry (k, l) is c(|l><k|)."""
        rng = np.random.default_rng(62)
        rho = _random_state(rng, 3)
        c = QChannel(
            np.array(
                [[rho.mat[l, k].reshape(1, 1) for l in range(3)] for k in range(3)]
            ).reshape(3, 3, 1, 1),
            (1,),
            (3,),
        )
        scalar = QState([[1.0]], (1,))
        got = co.pair(scalar, c)
        np.testing.assert_allclose(got.mat, rho.mat, atol=1e-12)

    def test_first_marginal_transposes_the_prior(self):
        rng = np.random.default_rng(63)
        sigma = _random_state(rng, 3)
        c = _random_unital_channel(rng, 3, 4)
        tau = co.pair(sigma, c)
        assert tau.dims == (3, 4)
        np.testing.assert_allclose(
            tau.marginal([1, 0]).mat, sigma.mat.T, atol=1e-12
        )

    def test_second_marginal_is_the_pushforward(self):
        rng = np.random.default_rng(64)
        sigma = _random_state(rng, 3)
        c = _random_unital_channel(rng, 3, 4)
        tau = co.pair(sigma, c)
        np.testing.assert_allclose(
            tau.marginal([0, 1]).mat, c.push(sigma).mat, atol=1e-12
        )

    def test_rejects_subunital_channel(self):
        sub = QChannel.from_kraus([np.eye(2) / np.sqrt(2)], (2,), (2,))
        with pytest.raises(ValueError):
            co.pair(QState.maximally_mixed((2,)), sub)

    def test_agrees_with_cup_route(self):
        """pair(sigma, c) = (asrt(sigma^T) (x) c) applied to n * cup."""
        rng = np.random.default_rng(65)
        sigma = _random_state(rng, 3)
        c = _random_unital_channel(rng, 3, 4)
        a = co.pair(sigma, c)
        b = co.pair_via_cup(sigma, c)
        np.testing.assert_allclose(a.mat, b.mat, atol=1e-12)


class TestProjectExtract:
    def test_project_cup_is_maximally_mixed(self):
        got = co.project(qu.cup(3))
        np.testing.assert_allclose(got.mat, np.eye(3) / 3, atol=1e-12)

    def test_project_product_state_transposes_first_factor(self):
        rng = np.random.default_rng(66)
        a = _random_state(rng, 2)
        b = _random_state(rng, 3)
        got = co.project(a.tensor(b))
        np.testing.assert_allclose(got.mat, a.mat.T, atol=1e-12)

    def test_extract_cup_is_identity(self):
        got = co.extract(qu.cup(3))
        np.testing.assert_allclose(
            got.blocks, QChannel.identity((3,)).blocks, atol=1e-12
        )

    def test_extract_product_state_is_constant(self):
        """A product joint disintegrates to the constant channel at rho."""
        rng = np.random.default_rng(67)
        a = _random_state(rng, 2)
        b = _random_state(rng, 3)
        got = co.extract(a.tensor(b))
        for k in range(3):
            for l in range(3):
                np.testing.assert_allclose(
                    got.blocks[k, l], b.mat[l, k] * np.eye(2), atol=1e-12
                )

    def test_recover_cup(self):
        first, chan, second = co.recover(qu.cup(3))
        np.testing.assert_allclose(first.mat, np.eye(3) / 3, atol=1e-12)
        np.testing.assert_allclose(
            chan.blocks, QChannel.identity((3,)).blocks, atol=1e-12
        )
        np.testing.assert_allclose(second.mat, np.eye(3) / 3, atol=1e-12)

    @pytest.mark.parametrize("dims", [(3, 5), (2, 2)])
    def test_round_trips(self, dims):
        n, m = dims
        rng = np.random.default_rng(68 + n + m)
        sigma = _random_state(rng, n)
        c = _random_unital_channel(rng, n, m)
        tau = co.pair(sigma, c)
        np.testing.assert_allclose(
            co.project(tau).mat, sigma.mat, atol=1e-9
        )
        np.testing.assert_allclose(
            co.extract(tau).pull(Effect.truth((m,))).mat, np.eye(n), atol=1e-9
        )
        back = co.pair(co.project(tau), co.extract(tau))
        np.testing.assert_allclose(back.mat, tau.mat, atol=1e-9)
        # and starting from a plain joint state instead of a built pair
        raw = _random_state(rng, n * m)
        raw = QState(raw.mat, (n, m))
        back = co.pair(co.project(raw), co.extract(raw))
        np.testing.assert_allclose(back.mat, raw.mat, atol=1e-9)

    def test_extract_needs_joint(self):
        with pytest.raises(DimensionError):
            co.extract(QState.maximally_mixed((4,)))

    def test_singular_first_marginal_rejected(self):
        """Extraction fails on rank-deficient M1 but conditioning still works."""
        corner = QState(np.diag([1.0, 0.0]), (2,))
        tau = corner.tensor(QState.maximally_mixed((2,)))
        tau = QState(tau.mat, (2, 2))
        with pytest.raises(SingularMarginalError):
            co.extract(tau)
        ket0 = Effect([[1, 0], [0, 0]], (2,))
        got = co.crossover_second(tau, ket0)
        np.testing.assert_allclose(got.mat, np.eye(2) / 2, atol=1e-12)


class TestInferenceTheorem:
    def test_truth_evidence_reduces_to_marginals(self):
        rng = np.random.default_rng(71)
        sigma = _random_state(rng, 3)
        c = _random_unital_channel(rng, 3, 5)
        tau = co.pair(sigma, c)
        got = co.crossover_second(tau, Effect.truth((3,)))
        np.testing.assert_allclose(got.mat, tau.marginal([0, 1]).mat, atol=1e-12)
        got = co.crossover_first(tau, Effect.truth((5,)))
        np.testing.assert_allclose(got.mat, tau.marginal([1, 0]).mat, atol=1e-12)

    @pytest.mark.parametrize("dims", [(3, 5), (2, 2)])
    def test_forward_direction(self, dims):
        """Crossover on the first leg = push through the extracted channel."""
        n, m = dims
        rng = np.random.default_rng(72 + n + m)
        tau = _random_state(rng, n * m)
        tau = QState(tau.mat, (n, m))
        p = _random_effect(rng, n)
        a = co.crossover_second(tau, p)
        b = co.inference_forward(tau, p)
        np.testing.assert_allclose(a.mat, b.mat, atol=1e-9)

    @pytest.mark.parametrize("dims", [(3, 5), (2, 2)])
    def test_backward_direction(self, dims):
        """Crossover on the second leg = pull and upper-condition the prior."""
        n, m = dims
        rng = np.random.default_rng(73 + n + m)
        tau = _random_state(rng, n * m)
        tau = QState(tau.mat, (n, m))
        q = _random_effect(rng, m)
        a = co.crossover_first(tau, q)
        b = co.inference_backward(tau, q)
        np.testing.assert_allclose(a.mat, b.mat, atol=1e-9)

    def test_diagonal_instance_matches_classical(self):
        """Embedded smoking/cancer data reproduces the classical posterior."""
        bnd = Space(["t", "f"])
        smoking = Dist(bnd, [0.3, 0.7])
        cancer = StochChannel(bnd, bnd, [[0.4, 0.6], [0.05, 0.95]])
        tau_cl = cl.pair(smoking, cancer)
        tau = co.pair(qu.hat_state(smoking), qu.hat_channel(cancer))
        np.testing.assert_allclose(
            tau.mat, qu.hat_state(tau_cl).mat, atol=1e-12
        )
        evidence = FuzzyPred(bnd, [0.95, 0.25])
        got = co.crossover_second(tau, qu.hat_pred(evidence))
        want = cl.condition(
            tau_cl, evidence.tensor(FuzzyPred.truth(bnd))
        ).marginal([0, 1])
        np.testing.assert_allclose(got.mat, qu.hat_state(want).mat, atol=1e-12)
        got = co.inference_forward(tau, qu.hat_pred(evidence))
        np.testing.assert_allclose(got.mat, qu.hat_state(want).mat, atol=1e-12)
