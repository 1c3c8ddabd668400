"""Irreducible many-body correlations for lattice spin states.

Builds toric-code-plus-field ground states, extracts reduced density
matrices, solves maximum-entropy marginal-matching problems, and derives
correlation hierarchies, topological-entropy comparisons, and field-sweep
transition indicators from them.
"""

__version__ = "0.1.0"

__all__ = [
    "lattice",
    "pauli",
    "kernels",
    "spectra",
    "rdm",
    "maxent",
    "correl",
    "scan",
    "verify",
    "cli",
]
