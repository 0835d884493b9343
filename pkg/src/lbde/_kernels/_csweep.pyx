#cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs-sweep kernel.

Mirror of ``_pysweep.sweep``: same conditional updates, same draw order, same
floating-point expression forms, drawing from the same numpy bit generator
through the C distributions API.  A fixed seed therefore yields bit-identical
chains on either backend.  Any change here must be made in lockstep with
``_pysweep.py``.
"""
import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY, exp, sqrt
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_beta,
    random_gamma,
    random_normal,
    random_standard_uniform,
)

from ..errors import DegenerateConditionalError, NumericalError, TruncationError

cnp.import_array()

NAME = "compiled"


cdef bitgen_t *_bitgen_of(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def sweep(object log_y, object v, object w, object mu, object u, object d,
          double lam, Py_ssize_t n_active, double a, double b, double s,
          double c, Py_ssize_t n_max, object rng):
    """One full Gibbs sweep; mutates the state arrays, returns (n_active, lam)."""
    cdef double[::1] ly = log_y
    cdef double[::1] vv = v
    cdef double[::1] ww = w
    cdef double[::1] muv = mu
    cdef double[::1] uu = u
    cdef cnp.int64_t[::1] dd = d

    cdef Py_ssize_t n = ly.shape[0]
    cdef Py_ssize_t N = n_active
    cdef Py_ssize_t i, j, pos, last, pick
    cdef cnp.int64_t tail_acc
    cdef double rem, prec, mean_j, sd_j, rss, resid, shape, rate
    cdef double thresh, cw, w_sum, sd0, vn, mun, wn, u_min
    cdef double coef, lyi, ui, dlt, sc, peak, tot, p, target, acc
    cdef bint found

    counts_arr = np.empty(n_max, dtype=np.int64)
    tails_arr = np.empty(n_max, dtype=np.int64)
    sums_arr = np.empty(n_max, dtype=np.float64)
    prob_arr = np.empty(n_max, dtype=np.float64)
    ru_arr = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef cnp.int64_t[::1] tails = tails_arr
    cdef double[::1] sums = sums_arr
    cdef double[::1] prob = prob_arr
    cdef double[::1] ru = ru_arr

    cdef object bit_generator = rng.bit_generator
    cdef bitgen_t *bitgen = _bitgen_of(bit_generator)

    with bit_generator.lock:
        # --- sticks: v_j ~ Beta(1 + n_j, c + sum_{l>j} n_l), ascending j ---
        for j in range(N):
            counts[j] = 0
        for i in range(n):
            counts[dd[i]] += 1
        tail_acc = 0
        for j in range(N - 1, -1, -1):
            tails[j] = tail_acc
            tail_acc += counts[j]
        for j in range(N):
            vv[j] = random_beta(bitgen, 1.0 + <double> counts[j], c + <double> tails[j])
        rem = 1.0
        for j in range(N):
            ww[j] = vv[j] * rem
            rem = rem * (1.0 - vv[j])

        # --- atoms: mu_j ~ N(lam S_j / (s + lam n_j), 1/(s + lam n_j)), ascending j ---
        for j in range(N):
            sums[j] = 0.0
        for i in range(n):
            sums[dd[i]] += ly[i]
        for j in range(N):
            prec = s + lam * <double> counts[j]
            mean_j = lam * sums[j] / prec
            sd_j = sqrt(1.0 / prec)
            muv[j] = random_normal(bitgen, mean_j, sd_j)

        # --- precision: lam ~ Ga(a + n/2, b + rss/2) ---
        rss = 0.0
        for i in range(n):
            resid = ly[i] - muv[dd[i]]
            rss += resid * resid
        shape = a + 0.5 * <double> n
        rate = b + 0.5 * rss
        if rate <= 0.0:
            raise DegenerateConditionalError(
                "precision conditional Ga(%g, 0) is improper: zero prior rate and "
                "zero residuals" % shape
            )
        lam = random_gamma(bitgen, shape, 1.0 / rate)

        # --- slice levels: u_i ~ U(0, w_{d_i}), zero uniforms redrawn in rounds ---
        for i in range(n):
            ru[i] = random_standard_uniform(bitgen)
        while True:
            found = False
            for i in range(n):
                if ru[i] == 0.0:
                    ru[i] = random_standard_uniform(bitgen)
                    found = True
            if not found:
                break
        u_min = INFINITY
        for i in range(n):
            uu[i] = ww[dd[i]] * ru[i]
            if uu[i] < u_min:
                u_min = uu[i]

        # --- coverage: shrink to the minimal covering prefix or extend with priors ---
        thresh = 1.0 - u_min
        cw = 0.0
        pos = -1
        for j in range(N):
            cw += ww[j]
            if cw > thresh:
                pos = j
                break
        if pos >= 0:
            N = pos + 1
        else:
            w_sum = cw
            rem = 1.0
            for j in range(N):
                rem = rem * (1.0 - vv[j])
            sd0 = sqrt(1.0 / s)
            while w_sum <= thresh:
                if N >= n_max:
                    raise TruncationError(
                        "slice coverage needs more than n_max=%d components "
                        "(covered mass %.17g, threshold %.17g)" % (n_max, w_sum, thresh)
                    )
                vn = random_beta(bitgen, 1.0, c)
                mun = random_normal(bitgen, 0.0, sd0)
                vv[N] = vn
                muv[N] = mun
                wn = vn * rem
                ww[N] = wn
                w_sum += wn
                rem = rem * (1.0 - vn)
                N += 1

        # --- allocations: P(d_i = j) prop. to 1(w_j > u_i) LN(y_i | mu_j, 1/lam) ---
        coef = -0.5 * lam
        for i in range(n):
            lyi = ly[i]
            ui = uu[i]
            peak = -INFINITY
            last = -1
            for j in range(N):
                if ww[j] > ui:
                    last = j
                    dlt = lyi - muv[j]
                    sc = coef * (dlt * dlt)
                    if sc > peak:
                        peak = sc
            if last < 0:
                raise NumericalError("empty slice set; state is numerically degenerate")
            tot = 0.0
            for j in range(N):
                if ww[j] > ui:
                    dlt = lyi - muv[j]
                    p = exp(coef * (dlt * dlt) - peak)
                else:
                    p = 0.0
                prob[j] = p
                tot += p
            target = random_standard_uniform(bitgen) * tot
            acc = 0.0
            pick = -1
            for j in range(N):
                acc += prob[j]
                if acc > target:
                    pick = j
                    break
            if pick < 0:
                pick = last
            dd[i] = pick

    return N, lam
