"""wavebound — amplitude bounds for steady water waves with positive constant vorticity."""

__version__ = "1.0.0"
