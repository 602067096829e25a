"""
ipstar-lab
Finite sums, IP*/J/CR largeness and density diagnostics over ℤ, ℤ/nℤ, ℤ[x]
and free semigroups, with an experiment CLI that writes re-checkable reports.
"""

__version__ = "1.0.0"
