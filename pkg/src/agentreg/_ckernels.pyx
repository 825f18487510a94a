# Compiled twin of _pykernels. Arithmetic order mirrors the Python reference so
# both backends emit identical selections for identical seeds.

from libc.math cimport sqrt
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef double INV53 = 1.0 / 9007199254740992.0

LUCE = 0
CEILING = 1


cdef inline uint64_t _next(uint64_t* state) nogil:
    state[0] += <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef int _choose(double* w, int n, int rule, double* bias, double u) nogil:
    cdef double wmax = w[0]
    cdef double wmin = w[0]
    cdef double total, x, acc
    cdef int s, ntied, last, k
    for s in range(1, n):
        if w[s] > wmax:
            wmax = w[s]
        if w[s] < wmin:
            wmin = w[s]
    if rule == 0 and wmin != wmax:
        total = 0.0
        for s in range(n):
            total += w[s]
        x = u * total
        acc = 0.0
        for s in range(n):
            acc += w[s]
            if x < acc:
                return s
        return n - 1
    total = 0.0
    ntied = 0
    last = 0
    for s in range(n):
        if w[s] == wmax:
            total += bias[s]
            ntied += 1
            last = s
    if ntied == 1:
        return last
    if total <= 0.0:
        k = <int>(u * ntied)
        for s in range(n):
            if w[s] == wmax:
                if k == 0:
                    return s
                k -= 1
        return last
    x = u * total
    acc = 0.0
    for s in range(n):
        if w[s] == wmax:
            acc += bias[s]
            if x < acc:
                return s
    return last


def uniforms(seed, Py_ssize_t count):
    cdef uint64_t state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    out = []
    for i in range(count):
        out.append((_next(&state) >> 11) * INV53)
    return out


def choose_slot(weights, int rule, bias, double u):
    cdef int n = len(weights)
    cdef double* w = <double*>malloc(n * sizeof(double))
    cdef double* b = <double*>malloc(n * sizeof(double))
    cdef int s, pick
    try:
        for s in range(n):
            w[s] = weights[s]
            b[s] = bias[s]
        pick = _choose(w, n, rule, b, u)
    finally:
        free(w)
        free(b)
    return pick


def wilson_halfwidth(long successes, long n, double z):
    cdef double p = <double>successes / <double>n
    cdef double z2 = z * z
    return z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n)


def run_cell(seed, tool_weights, int rule, bias, long max_n, long min_n=0,
             double target=0.0, double z=1.96):
    cdef int n_tools = len(tool_weights)
    cdef uint64_t state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef double* tw = <double*>malloc(n_tools * sizeof(double))
    cdef double* sw = <double*>malloc(n_tools * sizeof(double))
    cdef double* b = <double*>malloc(n_tools * sizeof(double))
    cdef int* picks = <int*>malloc((max_n if max_n > 0 else 1) * sizeof(int))
    cdef long t, n, hits = 0, used = 0
    cdef int s, k, focal, pick
    cdef double u, p, z2 = z * z, hw
    try:
        for s in range(n_tools):
            tw[s] = tool_weights[s]
            b[s] = bias[s]
        with nogil:
            for t in range(max_n):
                focal = t % n_tools
                sw[focal] = tw[0]
                k = 1
                for s in range(n_tools):
                    if s != focal:
                        sw[s] = tw[k]
                        k += 1
                u = (_next(&state) >> 11) * INV53
                pick = _choose(sw, n_tools, rule, b, u)
                picks[t] = pick
                used = t + 1
                if pick == focal:
                    hits += 1
                n = t + 1
                if target > 0.0 and n >= min_n and n % n_tools == 0:
                    p = <double>hits / <double>n
                    hw = z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n)
                    if hw < target:
                        break
        return [picks[i] for i in range(used)]
    finally:
        free(tw)
        free(sw)
        free(b)
        free(picks)
