"""Growth-curve community detection and mobility-driven case forecasting."""

__version__ = "0.1.0"
