"""Figure scripts over the simulator's CSV outputs."""

from .decay import FigureSpec as DecayFigureSpec
from .decay import plot_decay_convergence
from .io import Curve, SchemaError, read_curve
from .two_photon import FigureSpec as TwoPhotonFigureSpec
from .two_photon import plot_two_photon

__version__ = "0.1.0"
