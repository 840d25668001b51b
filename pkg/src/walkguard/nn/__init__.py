from . import kernels, layers, ops
from .adam import Adam

__all__ = ["kernels", "layers", "ops", "Adam"]
