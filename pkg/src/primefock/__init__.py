"""Numerics for boson arrays with prime-labeled sites.

Core layout: exact integer infrastructure (numtheory), prime-zeta and
Dirichlet-series evaluation (dirichlet), the truncated operator algebra
(fock), coherent states and their closed forms (ncs), Hamiltonian spectra
(spectra).  The HTTP service lives under ``primefock.service`` and the CLI
in ``primefock.cli``.
"""

__version__ = "0.1.0"
