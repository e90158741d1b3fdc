"""Boussinesq long-time asymptotics - scattering data, parametrices and leading-order formulas."""

__version__ = "1.0.0"
