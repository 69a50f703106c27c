"""Safe nominal and adaptive boundary control of ODE-PDE-ODE sandwich plants."""

__version__ = "0.1.0"
