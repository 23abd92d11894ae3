"""Reed-Muller coset codes for wiretap channels and leakage estimation."""

__version__ = "0.1.0"
