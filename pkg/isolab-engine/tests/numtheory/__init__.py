"""
Isolab Number Theory Tests Package
"""
