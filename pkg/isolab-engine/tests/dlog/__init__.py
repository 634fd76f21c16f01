"""
Isolab Discrete Log Tests Package
"""
