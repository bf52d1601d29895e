"""
Attention field simulator
"""
