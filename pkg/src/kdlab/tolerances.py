"""Numerical tolerance ladder used across the package.

Exact combinatorial identities are checked at 1e-12, structural linear
algebra at 1e-10, state positivity at 1e-9, membership residuals at
1e-8 and witness gaps at 1e-6.  Each level absorbs the noise of the
computations below it, so a gap certified at 1e-6 survives the 1e-9
slack in the feasibility checks that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    exact: float = 1e-12        # indicator tables, character modulus, lattice identities
    structural: float = 1e-10   # unitarity, round trips, covariance
    positivity: float = 1e-9    # PSD slack and KD positivity of states
    membership: float = 1e-8    # span / hull residuals
    witness_gap: float = 1e-6   # separating-functional gaps
    recognition: float = 1e-7   # pure-family overlap deficit

    def override(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
