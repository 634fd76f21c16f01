"""
Isolab Graphs Tests Package
"""
