"""Build toy probabilistic theories in Bloch form and audit them against quantum-like postulates."""

__version__ = "0.1.0"
