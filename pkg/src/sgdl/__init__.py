"""Internal-environment decoherence model of the Stern-Gerlach experiment.

Submodules: :mod:`~sgdl.atomic` (mass ratios), :mod:`~sgdl.potentials`
(effective CM-relative potential), :mod:`~sgdl.engine` (state algebra),
:mod:`~sgdl.dynamics` (split-step runs, erasure, pointer sieve) and
:mod:`~sgdl.harness` (configs, outputs, reproduction).
"""

from . import atomic, dynamics, engine, errors, potentials

__version__ = "0.1.0"

__all__ = ["atomic", "dynamics", "engine", "errors", "potentials", "__version__"]
