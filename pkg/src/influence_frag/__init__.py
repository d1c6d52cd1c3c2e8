"""Influence-fragmentation process on random graphs G(n, m).

Simulation engines live in :mod:`process_sim`, mean-field predictions in
:mod:`analytic`, fragment-size laws in :mod:`fragmentology`, and the
estimators used by the acceptance suite in :mod:`stats`.
"""

__version__ = "0.1.0"
