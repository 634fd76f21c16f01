"""
Isolab Number Theory Package

Integer arithmetic, finite fields, elliptic curves, isogenies, modular
polynomials, class groups and Hecke character sums.
"""
