"""Microtubule cavity toolkit: kink transport, quantum-corrected solitons and
vacuum-field Rabi splitting."""

__version__ = "0.1.0"
