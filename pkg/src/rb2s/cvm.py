"""Cramér-von Mises distance between two discrete measures.

d(P, Q) = sum over atoms z of Q of  w_Q(z) * (F_P(z) - F_Q(z))^2, with both
CDFs evaluated right-continuously (an atom's own weight counts).  Computed
by a vectorized scan over the two sorted atom sequences rather than the
quadratic double loop.
"""
from __future__ import annotations

import numpy as np

from .dirichlet import DiscreteMeasure


def _cvm_sorted(p_atoms, p_weights, q_atoms, q_weights) -> float:
    """Distance from sorted atom/weight arrays; ties handled by summation."""
    cum_p = np.concatenate(([0.0], np.cumsum(p_weights)))
    cum_q = np.cumsum(q_weights)
    f_p = cum_p[np.searchsorted(p_atoms, q_atoms, side="right")]
    f_q = cum_q[np.searchsorted(q_atoms, q_atoms, side="right") - 1]
    diff = f_p - f_q
    return float(np.dot(q_weights, diff * diff))


def cvm_distance(p: DiscreteMeasure, q: DiscreteMeasure) -> float:
    """Q-weighted squared CDF discrepancy; asymmetric, always in [0, 1]."""
    return _cvm_sorted(p.atoms, p.weights, q.atoms, q.weights)
