"""Test package for skewgraph."""
