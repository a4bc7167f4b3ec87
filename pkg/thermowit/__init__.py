"""Thermodynamic entanglement witnesses for spin chains and Bose gases.

Modules
-------
core
    Dense linear algebra on qubit registers: operators, thermal states,
    partial traces, negativity and concurrence.
models
    Dimer, XXX, XX and alternating chain Hamiltonians.
thermal
    Thermal observables by exact diagonalization and, for the XX chain,
    by free fermions.
witnesses
    Energy and susceptibility witnesses and the (T, B) phase diagram.
bosegas
    Separability and BEC temperatures of an ideal Bose gas in a box.
order
    Correlation functions and their decay classification.
oracle
    Product-state bound checks and witness crossing temperatures.
"""

from utils import __version__

__all__ = ["__version__"]
