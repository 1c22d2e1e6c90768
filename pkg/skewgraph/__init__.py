"""skewgraph: step skew products over Markov shifts, their attractors and invariant measures."""

__version__ = "0.1.0"
