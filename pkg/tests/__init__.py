"""
Test suite for RABICAT (cat-state dynamics in the extended Rabi model)
"""
