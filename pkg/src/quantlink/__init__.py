"""quantlink: rate analysis for MIMO links with a budget of one-bit slicers.

The library splits into five layers: exact/asymptotic counting
(:mod:`quantlink.combinatorics`), the geometric region oracle
(:mod:`quantlink.arrangements`), channel models and classical transmitter
processing (:mod:`quantlink.channel`), the receiver state machines
(:mod:`quantlink.receivers`), and rate computations
(:mod:`quantlink.rates`).  :mod:`quantlink.harness` orchestrates experiments
behind the ``quantlink`` command.
"""

from . import arrangements, channel, combinatorics, harness, rates, receivers

__all__ = [
    "arrangements",
    "channel",
    "combinatorics",
    "harness",
    "rates",
    "receivers",
]

__version__ = "0.1.0"
