"""
Utility modules for Dephasing Tomography.
"""
