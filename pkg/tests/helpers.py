"""Independent reference implementations used to validate the library.

These deliberately avoid the library's own code paths: the polynomial
period comes from long division over GF(2), the MAP reference from an
exhaustive sum over every input sequence.
"""

import numpy as np


def poly_period(g_r: int) -> int:
    """Smallest e >= 1 with g_r | D^e + 1, by polynomial arithmetic.

    Tracks D^e mod g_r; requires g_r(0) = 1 so D is invertible.
    """
    assert g_r & 1
    nu = g_r.bit_length() - 1
    r, e = 2 % (1 << nu) if nu == 1 else 2, 1
    while r != 1:
        r <<= 1
        if r >> nu:
            r ^= g_r
        e += 1
        assert e <= 1 << nu, "period search exceeded group order"
    return e


def brute_force_map(trellis, sys_llr, par_llr, apriori, terminated):
    """A-posteriori LLRs from the exhaustive sum over all 2^k inputs."""
    k = len(sys_llr)
    nu = trellis.nu
    n_info = k - (nu if terminated else 0)
    num = np.full(k, -np.inf)
    den = np.full(k, -np.inf)
    for word in range(1 << n_info):
        state = 0
        ins = np.empty(k, dtype=np.int64)
        pars = np.empty(k, dtype=np.int64)
        for t in range(n_info):
            u = (word >> t) & 1
            ins[t] = u
            pars[t] = trellis.parity[u, state]
            state = int(trellis.next_state[u, state])
        if terminated:
            for t in range(n_info, k):
                u = int(trellis.termination_input[state])
                ins[t] = u
                pars[t] = trellis.parity[u, state]
                state = int(trellis.next_state[u, state])
        lp = 0.5 * np.sum((sys_llr + apriori) * (1 - 2 * ins)
                          + par_llr * (1 - 2 * pars))
        for t in range(k):
            if ins[t] == 0:
                num[t] = np.logaddexp(num[t], lp)
            else:
                den[t] = np.logaddexp(den[t], lp)
    return num - den


def enumerate_primitive_feedback(nu: int) -> list[int]:
    """All degree-nu primitive polynomials, by direct LFSR cycling.

    A polynomial with g(0)=1 is primitive iff the register visits all
    2^nu - 1 nonzero states before recurring, which equals poly_period
    reaching the maximum.
    """
    found = []
    for g in range(1 << nu | 1, 1 << (nu + 1), 2):
        if poly_period(g) == (1 << nu) - 1:
            found.append(g)
    return found
