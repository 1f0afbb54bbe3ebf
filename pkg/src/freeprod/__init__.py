"""Rooted graph products and their spectral laws."""
