"""Performance tests for skewgraph."""
