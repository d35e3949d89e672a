"""
comarr - exact toolkit for the t-fold center of mass arrangements M(t,k) and M'(t,k)
"""

__version__ = "0.1.0"
