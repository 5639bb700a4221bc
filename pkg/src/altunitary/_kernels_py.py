"""Reference numpy implementation of the alternating-product kernel."""

import numpy as np


def alternate(phi, w, w_adj, phases):
    """Apply the alternating product to ``phi`` (in place) and return it.

    ``phases[m-1]`` holds the diagonal of the m-th H-factor in the eigenbasis.
    Application order: ``(w, phases[0]), ..., (w, phases[-1])`` then
    ``(phases[-1], w_adj), ..., (phases[0], w_adj)``.
    """
    x = phi
    for row in phases:
        x = row * (w @ x)
    for row in phases[::-1]:
        x = w_adj @ (row * x)
    phi[:] = x
    return phi
