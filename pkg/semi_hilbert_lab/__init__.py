"""
Numerical laboratory for operators on semi-Hilbertian spaces.
"""
