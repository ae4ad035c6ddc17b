"""Laser-heated glass deposition: simulation and control toolkit.

Thin python layer over the C++ core. Everything lives in the compiled
module; this package just re-exports the public names.
"""

try:
    from . import _core as _c
except ImportError:  # development layout: extension built next to the sources
    import _core as _c

ToolkitError = _c.ToolkitError

zoh_pulse_model = _c.zoh_pulse_model
simulate_first_order = _c.simulate_first_order

GaussianBeam = _c.GaussianBeam
power_in_disk = _c.power_in_disk

IdentifiedModel = _c.IdentifiedModel
gen_prbs = _c.gen_prbs
gen_chirp = _c.gen_chirp
gen_sine = _c.gen_sine
fit_first_order = _c.fit_first_order
simulate_model = _c.simulate_model
fit_percent = _c.fit_percent

ControllerDesign = _c.ControllerDesign
design_first_order = _c.design_first_order
Controller = _c.Controller

default_config = _c.default_config
presets = _c.presets
run = _c.run

__version__ = _c.__version__

__all__ = [
    "ToolkitError",
    "zoh_pulse_model",
    "simulate_first_order",
    "GaussianBeam",
    "power_in_disk",
    "IdentifiedModel",
    "gen_prbs",
    "gen_chirp",
    "gen_sine",
    "fit_first_order",
    "simulate_model",
    "fit_percent",
    "ControllerDesign",
    "design_first_order",
    "Controller",
    "default_config",
    "presets",
    "run",
    "__version__",
]
