"""Pure-Python collapsed Gibbs sweep, the fallback kernel.

Arithmetic is kept operation-for-operation identical to the compiled kernel
(elementwise multiply/divide followed by a sequential cumulative sum), so both
produce bit-identical assignment streams from the same uniforms.
"""

from __future__ import annotations

import numpy as np

KERNEL_NAME = "python"


def sweep(
    z: np.ndarray,
    tuple_idx: np.ndarray,
    pass_idx: np.ndarray,
    lang_idx: np.ndarray,
    word_idx: np.ndarray,
    n_dk: np.ndarray,
    n_pk: np.ndarray,
    n_kw: np.ndarray,
    n_lk: np.ndarray,
    eta_v: np.ndarray,
    alpha: float,
    eta: float,
    uniforms: np.ndarray,
) -> None:
    """One full pass over all tokens, updating assignments and counts in place.

    Tokens arrive in canonical order; ``word_idx`` is pre-offset into the
    combined per-language vocabulary layout of ``n_kw``.
    """
    k_count = n_dk.shape[1]
    for i in range(z.shape[0]):
        d = tuple_idx[i]
        p = pass_idx[i]
        lang = lang_idx[i]
        w = word_idx[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_pk[p, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_lk[lang, k_old] -= 1
        probs = (n_dk[d] + alpha) * (n_kw[:, w] + eta) / (n_lk[lang] + eta_v[lang])
        cum = np.cumsum(probs)
        u = uniforms[i] * cum[-1]
        k_new = int(np.searchsorted(cum, u, side="right"))
        if k_new >= k_count:
            k_new = k_count - 1
        z[i] = k_new
        n_dk[d, k_new] += 1
        n_pk[p, k_new] += 1
        n_kw[k_new, w] += 1
        n_lk[lang, k_new] += 1
