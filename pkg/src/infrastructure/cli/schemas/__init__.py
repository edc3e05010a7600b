"""
CLI Schemas - Init.
"""

from .request import *
