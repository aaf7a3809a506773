"""Simulator and evaluation toolkit for the waveform ring-oscillator PUF."""

__version__ = "0.1.0"
