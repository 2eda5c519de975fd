# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation core.

Bitmask twin of ``_corepure``: postorder opcode arrays, carrier subsets as
64-bit masks, bound variables resolved against explicit stacks.  Limited to
carriers of at most 63 elements and binder depth 160; the engine falls back
to the pure core outside those bounds.
"""

from cpython cimport array
import array

ctypedef unsigned long long u64

DEF MAX_DEPTH = 160

OP_FEVAR = 0
OP_FSVAR = 1
OP_SYM = 2
OP_BOT = 3
OP_APP = 4
OP_IMP = 5
OP_EXISTS = 6
OP_MU = 7
OP_BEVAR = 8
OP_BSVAR = 9


cdef class Core:
    cdef int n, n_fev, n_fsv, root
    cdef u64 full
    cdef array.array _ops, _pa, _pb, _app, _sym, _fev, _fsv
    cdef long long[::1] ops, pa, pb
    cdef u64[::1] app_table, sym_masks
    cdef long long[::1] fev
    cdef u64[::1] fsv
    cdef long long be_stack[MAX_DEPTH]
    cdef u64 bs_stack[MAX_DEPTH]
    cdef int be_top, bs_top

    def __init__(self, n, ops, pa, pb, app_table, sym_masks, n_fev, n_fsv):
        if n > 63:
            raise ValueError("compiled core supports at most 63 elements")
        self.n = n
        self.full = (<u64>1 << n) - 1
        self._ops = array.array("q", ops)
        self._pa = array.array("q", pa)
        self._pb = array.array("q", pb)
        self._app = array.array("Q", app_table)
        self._sym = array.array("Q", sym_masks) if sym_masks else array.array("Q")
        self.ops = self._ops
        self.pa = self._pa
        self.pb = self._pb
        self.app_table = self._app
        self.sym_masks = self._sym if len(self._sym) else None
        self.n_fev = n_fev
        self.n_fsv = n_fsv
        self._fev = array.array("q", [0] * max(1, n_fev))
        self._fsv = array.array("Q", [0] * max(1, n_fsv))
        self.fev = self._fev
        self.fsv = self._fsv
        self.root = len(ops) - 1
        self.be_top = 0
        self.bs_top = 0

    cdef u64 _eval(self, int i):
        cdef int op = <int>self.ops[i]
        cdef u64 a, b, acc, x, y, lo
        cdef int ai, bi, row, elem, it
        cdef u64 cur, nxt
        if op == 4:  # APP
            a = self._eval(<int>self.pa[i])
            b = self._eval(<int>self.pb[i])
            acc = 0
            x = a
            while x:
                lo = x & (~x + 1)
                ai = _bit_index(lo)
                x ^= lo
                row = ai * self.n
                y = b
                while y:
                    lo = y & (~y + 1)
                    acc |= self.app_table[row + _bit_index(lo)]
                    y ^= lo
                if acc == self.full:
                    return self.full
            return acc
        if op == 5:  # IMP
            a = self._eval(<int>self.pa[i])
            b = self._eval(<int>self.pb[i])
            return self.full & ~(a & ~b)
        if op == 6:  # EXISTS
            acc = 0
            self.be_top += 1
            for elem in range(self.n):
                self.be_stack[self.be_top - 1] = elem
                acc |= self._eval(<int>self.pa[i])
                if acc == self.full:
                    break
            self.be_top -= 1
            return acc
        if op == 7:  # MU
            cur = 0
            self.bs_top += 1
            for it in range(self.n + 1):
                self.bs_stack[self.bs_top - 1] = cur
                nxt = self._eval(<int>self.pa[i])
                if nxt == cur:
                    break
                cur = nxt
            self.bs_top -= 1
            return cur
        if op == 0:  # FEVAR
            return <u64>1 << self.fev[<int>self.pa[i]]
        if op == 1:  # FSVAR
            return self.fsv[<int>self.pa[i]]
        if op == 2:  # SYM
            return self.sym_masks[<int>self.pa[i]]
        if op == 8:  # BEVAR
            return <u64>1 << self.be_stack[self.be_top - 1 - <int>self.pa[i]]
        if op == 9:  # BSVAR
            return self.bs_stack[self.bs_top - 1 - <int>self.pa[i]]
        return 0  # BOT

    def eval_assignment(self, fev, fsv):
        cdef int k
        for k in range(self.n_fev):
            self.fev[k] = fev[k]
        for k in range(self.n_fsv):
            self.fsv[k] = fsv[k]
        self.be_top = 0
        self.bs_top = 0
        return self._eval(self.root)

    def holds_all(self):
        """First failing assignment as (element indices, set masks), or None."""
        cdef int i, j
        cdef bint advanced
        for i in range(self.n_fev):
            self.fev[i] = 0
        for j in range(self.n_fsv):
            self.fsv[j] = 0
        while True:
            self.be_top = 0
            self.bs_top = 0
            if self._eval(self.root) != self.full:
                return (
                    tuple(self.fev[i] for i in range(self.n_fev)),
                    tuple(self.fsv[j] for j in range(self.n_fsv)),
                )
            advanced = False
            for i in range(self.n_fev):
                self.fev[i] += 1
                if self.fev[i] < self.n:
                    advanced = True
                    break
                self.fev[i] = 0
            if advanced:
                continue
            for j in range(self.n_fsv):
                self.fsv[j] += 1
                if self.fsv[j] <= self.full:
                    advanced = True
                    break
                self.fsv[j] = 0
            if not advanced:
                return None


cdef inline int _bit_index(u64 lo):
    cdef int idx = 0
    while lo > 1:
        lo >>= 1
        idx += 1
    return idx
