"""
Isolab Tests Package

This package contains tests for the isogeny lab components.
"""
