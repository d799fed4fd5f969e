"""
Test package for predens.
"""
