"""Ordered hypergraph Turan numbers for tight paths and the edge-labeling reformulation for r = 3."""
