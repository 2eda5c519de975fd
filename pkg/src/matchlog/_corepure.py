"""Pure-Python evaluation core.

Same contract as the compiled ``_corehot`` extension: patterns are
flattened to postorder opcode arrays, carrier subsets are bitmasks, and
bound variables are resolved against stacks of values instead of fresh
names.  Kept dependency-free so it always works; the engine picks this
module when the extension is unavailable.
"""

from __future__ import annotations

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


class Core:
    """Evaluates one compiled pattern over one compiled model."""

    def __init__(self, n, ops, pa, pb, app_table, sym_masks, n_fev, n_fsv):
        self.n = n
        self.full = (1 << n) - 1
        self.ops = list(ops)
        self.pa = list(pa)
        self.pb = list(pb)
        self.app_table = list(app_table)
        self.sym_masks = list(sym_masks)
        self.n_fev = n_fev
        self.n_fsv = n_fsv
        self.fev = [0] * n_fev
        self.fsv = [0] * n_fsv
        self.root = len(self.ops) - 1

    def eval_assignment(self, fev, fsv):
        self.fev[:] = fev
        self.fsv[:] = fsv
        return self._eval(self.root, [], [])

    def _eval(self, i, be, bs):
        op = self.ops[i]
        if op == OP_APP:
            a = self._eval(self.pa[i], be, bs)
            b = self._eval(self.pb[i], be, bs)
            acc = 0
            n = self.n
            table = self.app_table
            full = self.full
            x = a
            while x:
                lo = x & -x
                ai = lo.bit_length() - 1
                x ^= lo
                row = ai * n
                y = b
                while y:
                    lo2 = y & -y
                    acc |= table[row + lo2.bit_length() - 1]
                    y ^= lo2
                if acc == full:
                    return full
            return acc
        if op == OP_IMP:
            a = self._eval(self.pa[i], be, bs)
            b = self._eval(self.pb[i], be, bs)
            return self.full & ~(a & ~b)
        if op == OP_EXISTS:
            body = self.pa[i]
            acc = 0
            be.append(0)
            for elem in range(self.n):
                be[-1] = elem
                acc |= self._eval(body, be, bs)
                if acc == self.full:
                    break
            be.pop()
            return acc
        if op == OP_MU:
            body = self.pa[i]
            cur = 0
            bs.append(0)
            for _ in range(self.n + 1):
                bs[-1] = cur
                nxt = self._eval(body, be, bs)
                if nxt == cur:
                    break
                cur = nxt
            bs.pop()
            return cur
        if op == OP_FEVAR:
            return 1 << self.fev[self.pa[i]]
        if op == OP_FSVAR:
            return self.fsv[self.pa[i]]
        if op == OP_SYM:
            return self.sym_masks[self.pa[i]]
        if op == OP_BEVAR:
            return 1 << be[-1 - self.pa[i]]
        if op == OP_BSVAR:
            return bs[-1 - self.pa[i]]
        return 0  # OP_BOT

    def holds_all(self):
        """First assignment under which the pattern is not the full carrier,
        as (element-index tuple, set-mask tuple), or None."""
        n = self.n
        fev = [0] * self.n_fev
        fsv = [0] * self.n_fsv
        full = self.full
        while True:
            self.fev[:] = fev
            self.fsv[:] = fsv
            if self._eval(self.root, [], []) != full:
                return tuple(fev), tuple(fsv)
            i = 0
            while i < self.n_fev:
                fev[i] += 1
                if fev[i] < n:
                    break
                fev[i] = 0
                i += 1
            else:
                j = 0
                while j < self.n_fsv:
                    fsv[j] += 1
                    if fsv[j] <= full:
                        break
                    fsv[j] = 0
                    j += 1
                else:
                    return None
