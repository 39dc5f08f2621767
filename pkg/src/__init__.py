"""
QCCNN Lab package - statevector simulation of encoding circuits, hybrid
quantum convolution, circuit metrics and Fourier analysis
"""

__version__ = "1.0.0"
