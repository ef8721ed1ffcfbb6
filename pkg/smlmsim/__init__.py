"""Single-molecule localization microscopy simulation and evaluation."""

__version__ = '0.1.0'
