"""Numpy fallback for the compiled kernel.

Performs the same floating-point operations in the same order as
``_ckernels.apply_terms`` so the two backends agree bit for bit.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _flip_index(nbits: int, mask: int) -> tuple:
    # axis 0 of the (2,)*nbits view is the most significant bit
    return tuple(
        slice(None, None, -1) if (mask >> (nbits - 1 - ax)) & 1 else slice(None)
        for ax in range(nbits)
    )


@lru_cache(maxsize=256)
def _sign_array(nbits: int, smask: int) -> np.ndarray:
    idx = np.arange(1 << nbits, dtype=np.int64) & smask
    parity = np.zeros(1 << nbits, dtype=np.int64)
    for bit in range(nbits):
        parity ^= (idx >> bit) & 1
    signs = 1.0 - 2.0 * parity
    signs.flags.writeable = False
    return signs


def apply_terms(psi, diag, masks, smasks, coefs, out):
    n = psi.shape[0]
    nbits = n.bit_length() - 1
    shape = (2,) * nbits + (2,)
    src = psi.reshape(shape)
    np.multiply(diag[:, None], psi, out=out)
    acc = out.reshape(shape)
    for mask, smask, coef in zip(masks.tolist(), smasks.tolist(), coefs.tolist()):
        flipped = src[_flip_index(nbits, mask)]
        if smask:
            c = (coef * _sign_array(nbits, smask)).reshape((2,) * nbits + (1,))
        else:
            c = coef
        acc += c * flipped
