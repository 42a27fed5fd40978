"""Version information for einstab"""

__version__ = "0.1.0"
