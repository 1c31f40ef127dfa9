"""Random group presentations, geometric forms and their fillings."""
from .complexes import AbstractLabeling, Complex2
from .forms import GeometricForm, builtin_form, critical_density, density, subdivide
from .words import Word, count_cyclically_reduced, format_word, parse_word

__all__ = [
    "AbstractLabeling", "Complex2", "GeometricForm", "Word", "builtin_form",
    "count_cyclically_reduced", "critical_density", "density", "format_word",
    "parse_word", "subdivide",
]
__version__ = "0.1.0"
