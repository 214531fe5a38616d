"""Pure-Python reference kernels.

Same contracts as the compiled module ``uolsim._kernels``; this is the
fallback selected by :mod:`uolsim.backend` when the extension is not built.
The loops are written plainly on purpose: they are the readable statement
of the semantics the Cython port must reproduce.

Flattened hypothesis layout (parallel int64 arrays, one row per hypothesis):
  kind 0  eventually-constant: aux[off:off+n] = prefix bits, p0 = tail bit
  kind 1  threshold on N:      p0 = cut, label = 1 iff x >= cut
  kind 2  threshold on Z:      p0 = cut, label = 1 iff zigzag(x) >= cut
  kind 3  finite table:        aux[off:off+n] = (key, value) pairs sorted
                               by key, p0 = default label

Machine code layout: int64 triples (op, a, b) with
  op 0 INC a   op 1 DEC a (floored)   op 2 JZ a,b   op 3 JMP a   op 4 HALT
INC/DEC/JZ cost one step each; JMP and HALT are free.
"""

BACKEND_NAME = "python"

OP_INC = 0
OP_DEC = 1
OP_JZ = 2
OP_JMP = 3
OP_HALT = 4


def _zigzag(x):
    # 0,1,-1,2,-2,... : position x on N mapped to Z
    return (x + 1) >> 1 if x & 1 else -(x >> 1)


def eval_flat(kind, p0, off, n, aux, x):
    """Evaluate one flattened hypothesis at point ``x``."""
    if kind == 0:
        return int(aux[off + x]) if x < n else int(p0)
    if kind == 1:
        return 1 if x >= p0 else 0
    if kind == 2:
        return 1 if _zigzag(x) >= p0 else 0
    if kind == 3:
        lo, hi = 0, n >> 1
        while lo < hi:
            mid = (lo + hi) >> 1
            key = aux[off + 2 * mid]
            if key == x:
                return int(aux[off + 2 * mid + 1])
            if key < x:
                lo = mid + 1
            else:
                hi = mid
        return int(p0)
    raise ValueError("unknown flat kind %r" % (kind,))


def scan_consistent(kinds, p0s, offs, lens, aux, xs, ys, start, stop):
    """Least index in [start, stop) consistent with every (x, y); -1 if none."""
    npts = len(xs)
    for i in range(start, stop):
        kind = kinds[i]
        p0 = p0s[i]
        off = offs[i]
        n = lens[i]
        ok = True
        for j in range(npts):
            if eval_flat(kind, p0, off, n, aux, xs[j]) != ys[j]:
                ok = False
                break
        if ok:
            return i
    return -1


def mismatch_counts(kinds, p0s, offs, lens, aux, xs, ys, out):
    """out[i] = number of points where hypothesis i disagrees with the labels."""
    npts = len(xs)
    for i in range(len(out)):
        kind = kinds[i]
        p0 = p0s[i]
        off = offs[i]
        n = lens[i]
        bad = 0
        for j in range(npts):
            if eval_flat(kind, p0, off, n, aux, xs[j]) != ys[j]:
                bad += 1
        out[i] = bad


def run_machine(code, nregs, x, budget):
    """Run flattened machine code with input x in register 0.

    Returns (halted, value, steps): halted is 0/1, value is the output bit
    (register 1 nonzero), steps is the count of costed instructions executed
    (capped at budget when still running).
    """
    regs = [0] * nregs
    if nregs > 0:
        regs[0] = x
    pc = 0
    steps = 0
    ncode = len(code)
    while pc < ncode:
        op = code[pc]
        if op == OP_HALT:
            return 1, (1 if nregs > 1 and regs[1] != 0 else 0), steps
        if op == OP_JMP:
            pc = code[pc + 1]
            continue
        if steps >= budget:
            return 0, 0, steps
        steps += 1
        if op == OP_INC:
            regs[code[pc + 1]] += 1
        elif op == OP_DEC:
            r = code[pc + 1]
            if regs[r] > 0:
                regs[r] -= 1
        elif op == OP_JZ:
            if regs[code[pc + 1]] == 0:
                pc = code[pc + 2]
                continue
        else:
            raise ValueError("bad opcode %r" % (op,))
        pc += 3
    return 1, (1 if nregs > 1 and regs[1] != 0 else 0), steps
