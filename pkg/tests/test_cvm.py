"""Distance tests: hand values, identity, range, and the brute-force oracle."""
import numpy as np
import pytest

from rb2s.cvm import cvm_distance
from rb2s.dirichlet import DiscreteMeasure, DpPrior
from rb2s.distributions import Normal
from rb2s.testkit import prior_distance_sample


def cvm_brute_force(p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Quadratic-time oracle: both CDFs right-continuous at Q's atoms."""
    total = 0.0
    for z, w in zip(q.atoms, q.weights):
        f_p = sum(wp for ap, wp in zip(p.atoms, p.weights) if ap <= z)
        f_q = sum(wq for aq, wq in zip(q.atoms, q.weights) if aq <= z)
        total += w * (f_p - f_q) ** 2
    return total


def random_measure(rng) -> DiscreteMeasure:
    n = int(rng.integers(1, 21))
    # integer atoms force ties within and across measures
    atoms = np.where(rng.random(n) < 0.5,
                     rng.normal(0.0, 2.0, n),
                     rng.integers(-3, 4, n).astype(float))
    weights = rng.dirichlet(np.ones(n))
    order = np.argsort(atoms, kind="stable")
    return DiscreteMeasure(atoms[order], weights[order])


class TestHandValues:
    def test_two_atoms_vs_point_mass(self):
        p = DiscreteMeasure(np.array([0.0, 2.0]), np.array([0.5, 0.5]))
        q = DiscreteMeasure(np.array([1.0]), np.array([1.0]))
        assert cvm_distance(p, q) == pytest.approx(0.25, abs=1e-15)

    def test_point_mass_vs_two_atoms(self):
        p = DiscreteMeasure(np.array([1.0]), np.array([1.0]))
        q = DiscreteMeasure(np.array([0.0, 2.0]), np.array([0.5, 0.5]))
        assert cvm_distance(p, q) == pytest.approx(0.125, abs=1e-15)

    def test_asymmetry_witnessed(self):
        p = DiscreteMeasure(np.array([0.0, 2.0]), np.array([0.5, 0.5]))
        q = DiscreteMeasure(np.array([1.0]), np.array([1.0]))
        assert cvm_distance(p, q) != cvm_distance(q, p)

    def test_ordered_point_masses(self):
        # right-continuous evaluation: a point mass strictly below another
        # sees both CDFs at one on the upper atom
        d0 = DiscreteMeasure(np.array([0.0]), np.array([1.0]))
        d1 = DiscreteMeasure(np.array([1.0]), np.array([1.0]))
        assert cvm_distance(d0, d1) == 0.0
        assert cvm_distance(d1, d0) == 1.0


class TestProperties:
    def test_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            m = random_measure(rng)
            assert cvm_distance(m, m) == 0.0

    def test_range(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p, q = random_measure(rng), random_measure(rng)
            d = cvm_distance(p, q)
            assert 0.0 <= d <= 1.0

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p, q = random_measure(rng), random_measure(rng)
            assert cvm_distance(p, q) == pytest.approx(
                cvm_brute_force(p, q), abs=1e-12)

    def test_tied_atoms_across_measures(self):
        p = DiscreteMeasure(np.array([1.0, 1.0, 3.0]), np.array([0.2, 0.3, 0.5]))
        q = DiscreteMeasure(np.array([1.0, 3.0]), np.array([0.5, 0.5]))
        assert cvm_distance(p, q) == pytest.approx(cvm_brute_force(p, q), abs=1e-15)


class TestTruncationStability:
    def test_prior_distance_mean_insensitive_to_cutoff(self):
        # the distance law stabilizes well before the default truncation
        base = Normal(0.0, 1.0)
        m_short = prior_distance_sample(1.0, base, 500, 2000, master_seed=424242).mean()
        m_long = prior_distance_sample(1.0, base, 2000, 2000, master_seed=424242).mean()
        assert abs(m_short - m_long) < 0.005
