"""
Isolab Graphs Package

Spectral analysis, random walks, explicit isogeny graphs, volcano levels
and supersingular graphs.
"""
