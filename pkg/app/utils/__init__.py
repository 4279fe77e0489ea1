"""Engines for the characteristic-class calculator."""
