"""Figure rendering for fleetlab CSV artifacts.

This package reads only the published CSV schemas; it has no dependency on
the simulation package itself.
"""

from fleetfigs.render import FIGURE_IDS, FigureSpec, build_spec, render

__version__ = "0.1.0"

__all__ = ["FIGURE_IDS", "FigureSpec", "build_spec", "render", "__version__"]
