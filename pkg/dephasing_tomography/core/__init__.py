"""
Core interfaces, parameter vectors and the model registry.
"""
