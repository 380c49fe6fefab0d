"""Instance generation, file formats, reports and sweeps."""

from .generators import gen_instance, gen_surrogate
from .matrix_io import io_matrix, read_matrix, write_matrix

__all__ = ["gen_instance", "gen_surrogate", "io_matrix", "read_matrix", "write_matrix"]
