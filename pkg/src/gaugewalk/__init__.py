"""1D discrete-time quantum walks with exact discrete U(N) gauge invariance,
a discrete curvature observable, a pseudo-spectral Dirac reference solver,
and classical colored-particle comparison trajectories."""

from . import analysis, classical, dirac, experiments, io, lattice, unitary, walker

__all__ = ["analysis", "classical", "dirac", "experiments", "io", "lattice", "unitary", "walker"]
__version__ = "0.1.0"
