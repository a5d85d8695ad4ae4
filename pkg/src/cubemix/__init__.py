"""Scrambling Markov chain for the Pocket and Rubik's cubes."""

__version__ = "0.1.0"
