"""Recurrence machinery for random walks with negative drift.

Thin wrapper around the C++ core `_walkdrift`: finite-support distributions
with stochastic-dominance tests, Markov-chain return-time statistics, the two
escape counterexample chains, unimodular-lattice geometry, and the lattice
drift function with its verification suite.
"""

try:
    from ._walkdrift import *  # noqa: F401,F403  (installed wheel layout)
    from ._walkdrift import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree builds put the module on PYTHONPATH directly
    from _walkdrift import *  # noqa: F401,F403
