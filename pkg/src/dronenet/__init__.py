"""Simulator for drone-served roadside-unit networks.

Covers ground-node placement (hard-core point process), aerial access-point
positioning (k-means), air-to-ground link budgets, greedy demand association
under backhaul limits, and a permissioned registration ledger.
"""

__version__ = "0.1.0"
