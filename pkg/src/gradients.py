#!/usr/bin/env python3
"""
Gradients - Parameter-shift and finite-difference Jacobians for circuits whose
trainable gates are single-parameter Pauli rotations
"""
from typing import Callable

import numpy as np

# Shift for generators with eigenvalues +-1/2
SHIFT = np.pi / 2


def parameter_shift_jacobian(fn: Callable[[np.ndarray], np.ndarray], values) -> np.ndarray:
    """
    Exact Jacobian d fn / d values via (fn(v + pi/2) - fn(v - pi/2)) / 2

    Args:
        fn: Maps a flat angle vector to an output vector (expectations or probabilities)
        values: Angles at which to differentiate

    Returns:
        Array shaped (n_outputs, n_params)
    """
    values = np.asarray(values, dtype=float)
    columns = []
    for i in range(len(values)):
        plus = values.copy()
        plus[i] += SHIFT
        minus = values.copy()
        minus[i] -= SHIFT
        columns.append((np.asarray(fn(plus)) - np.asarray(fn(minus))) / 2)
    if not columns:
        return np.zeros((len(np.atleast_1d(fn(values))), 0))
    return np.stack(columns, axis=-1)


def finite_difference_jacobian(fn: Callable[[np.ndarray], np.ndarray], values,
                               h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian, shaped like parameter_shift_jacobian"""
    values = np.asarray(values, dtype=float)
    columns = []
    for i in range(len(values)):
        plus = values.copy()
        plus[i] += h
        minus = values.copy()
        minus[i] -= h
        columns.append((np.asarray(fn(plus)) - np.asarray(fn(minus))) / (2 * h))
    return np.stack(columns, axis=-1)
