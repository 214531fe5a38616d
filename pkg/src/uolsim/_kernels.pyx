# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: hot inner loops behind the backend facade.

Contracts and layouts match uolsim._pykernels exactly; see that module for
the readable reference semantics.
"""

BACKEND_NAME = "compiled"

cdef long long ZIGZAG(long long x) noexcept nogil:
    if x & 1:
        return (x + 1) >> 1
    return -(x >> 1)


cdef long long EVAL(long long kind, long long p0, long long off, long long n,
                    const long long[::1] aux, long long x) noexcept nogil:
    cdef long long lo, hi, mid, key
    if kind == 0:
        if x < n:
            return aux[off + x]
        return p0
    if kind == 1:
        return 1 if x >= p0 else 0
    if kind == 2:
        return 1 if ZIGZAG(x) >= p0 else 0
    # kind 3: sorted (key, value) pairs
    lo = 0
    hi = n >> 1
    while lo < hi:
        mid = (lo + hi) >> 1
        key = aux[off + 2 * mid]
        if key == x:
            return aux[off + 2 * mid + 1]
        if key < x:
            lo = mid + 1
        else:
            hi = mid
    return p0


def eval_flat(long long kind, long long p0, long long off, long long n,
              const long long[::1] aux, long long x):
    if kind < 0 or kind > 3:
        raise ValueError("unknown flat kind %r" % (kind,))
    return EVAL(kind, p0, off, n, aux, x)


def scan_consistent(const long long[::1] kinds, const long long[::1] p0s,
                    const long long[::1] offs, const long long[::1] lens,
                    const long long[::1] aux,
                    const long long[::1] xs, const long long[::1] ys,
                    long long start, long long stop):
    cdef long long i, j, npts
    cdef bint ok
    npts = xs.shape[0]
    for i in range(start, stop):
        ok = True
        for j in range(npts):
            if EVAL(kinds[i], p0s[i], offs[i], lens[i], aux, xs[j]) != ys[j]:
                ok = False
                break
        if ok:
            return i
    return -1


def mismatch_counts(const long long[::1] kinds, const long long[::1] p0s,
                    const long long[::1] offs, const long long[::1] lens,
                    const long long[::1] aux,
                    const long long[::1] xs, const long long[::1] ys,
                    long long[::1] out):
    cdef long long i, j, bad, npts, nh
    npts = xs.shape[0]
    nh = out.shape[0]
    for i in range(nh):
        bad = 0
        for j in range(npts):
            if EVAL(kinds[i], p0s[i], offs[i], lens[i], aux, xs[j]) != ys[j]:
                bad += 1
        out[i] = bad


def run_machine(const long long[::1] code, long long nregs, long long x,
                long long budget):
    cdef long long pc = 0, steps = 0, op, r, ncode
    cdef long long value
    cdef long long[64] small
    cdef long long i
    if nregs > 64:
        raise ValueError("machine uses too many registers")
    for i in range(64):
        small[i] = 0
    if nregs > 0:
        small[0] = x
    ncode = code.shape[0]
    while pc < ncode:
        op = code[pc]
        if op == 4:  # HALT
            value = 1 if nregs > 1 and small[1] != 0 else 0
            return 1, value, steps
        if op == 3:  # JMP
            pc = code[pc + 1]
            continue
        if steps >= budget:
            return 0, 0, steps
        steps += 1
        if op == 0:  # INC
            small[code[pc + 1]] += 1
        elif op == 1:  # DEC
            r = code[pc + 1]
            if small[r] > 0:
                small[r] -= 1
        elif op == 2:  # JZ
            if small[code[pc + 1]] == 0:
                pc = code[pc + 2]
                continue
        else:
            raise ValueError("bad opcode %r" % (op,))
        pc += 3
    value = 1 if nregs > 1 and small[1] != 0 else 0
    return 1, value, steps
