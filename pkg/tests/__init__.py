"""
Test package for Dephasing Tomography.
"""
