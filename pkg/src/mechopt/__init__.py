"""mechopt: design optimization of planar four-bar point-to-point mechanisms.

Checks design feasibility over a required range of motion, maps an imposed
end-effector motion delta(t) to the motor motion theta(t), computes the
driving-torque profile by inverse dynamics, and minimizes RMS torque over
the link lengths (|OA|, |AB|, |BC|) with a genetic algorithm or a
gradient-based local search.
"""
from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def example_config_path() -> Path:
    """Path of the bundled example problem configuration."""
    return Path(resources.files("mechopt").joinpath("data/coronaventilator.cfg"))
