"""Exact and analytic tools for counting D4 quartic fields through quadratic extensions of quadratic fields."""

from .quadfield import QuadField, FieldElement, QuadIdeal
from .classgroup import class_group, class_number
from .selmer import selmer_group, describe
from .counting import count_relative_characters, count_relative_direct
from .analytic import L_value, constant_C, main_term_constant
from .census import quad_over_quad_total, v4_independent

__version__ = "0.1.0"
