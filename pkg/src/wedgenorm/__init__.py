"""Injective norms of random antisymmetric (fermionic) Gaussian tensors."""

__version__ = "0.1.0"
