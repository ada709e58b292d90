"""Itinerary spaces of dendrite maps: symbolic core, pseudo-orbits, shadowing."""

__version__ = "0.1.0"
