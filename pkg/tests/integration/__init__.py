"""Integration tests for skewgraph."""
