"""Incremental prefix-table computation: one worklist pass per input byte.

Feeding a byte appends a fresh column and seeds the work list with that
column's simple rules. Every pop resolves exactly one cell; resolving a
cell wakes the cells that were recorded as waiting on it, and gives every
ternary rule conditioning on the resolved row its now-known dynamic
dependency, which is recorded for later wake-ups (possibly in a column
that does not exist yet). Each cell enters the work list at most once, so
the loop runs in time linear in the number of resolved cells.

Reverse-dependency lists are append-only between truncations; truncation
just advances the shared base, and sources that fell below the base are
filtered out when a list is consumed.
"""

from __future__ import annotations

from .grammar import K_EPS, K_FAIL, K_TERM, K_TERNARY
from .table import BOTTOM, FAIL, _ShiftList, apply_F


class RevDeps:
    """Per-cell lists of cells whose dynamic dependency points there.

    Column-aligned with the table it serves, plus one slot past the end:
    a resolved condition may defer a cell to the first not-yet-seen
    column. Entries are (row, abs_col) sources; a slot holds None, a
    single entry, or a list of entries.
    """

    def __init__(self, nrules):
        self.nrules = nrules
        self.base = 0
        self.cols = _ShiftList()
        self.cols.append([None] * nrules)  # the one-past-the-end slot

    def add(self, dst_row, dst_col, src_row, src_col):
        k = dst_col - self.base
        assert 0 <= k < len(self.cols), f"dependency outside window: {dst_col}"
        slot = self.cols[k]
        cur = slot[dst_row]
        if cur is None:
            slot[dst_row] = (src_row, src_col)
        elif type(cur) is tuple:
            slot[dst_row] = [cur, (src_row, src_col)]
        else:
            cur.append((src_row, src_col))

    def waiters(self, row, col):
        """Live sources recorded for (row, col); stale ones are skipped."""
        k = col - self.base
        if not (0 <= k < len(self.cols)):
            return ()
        cur = self.cols[k][row]
        if cur is None:
            return ()
        base = self.base
        if type(cur) is tuple:
            return (cur,) if cur[1] >= base else ()
        return [e for e in cur if e[1] >= base]

    def append_column(self):
        self.cols.append([None] * self.nrules)

    def truncate(self, m):
        assert 0 <= m < len(self.cols) + 1
        self.cols.drop(m)
        self.base += m

    def as_mapping(self):
        """Live content as {(row, col): sorted sources}; used by tests."""
        out = {}
        for k in range(len(self.cols)):
            for row in range(self.nrules):
                live = sorted(self.waiters(row, self.base + k))
                if live:
                    out[(row, self.base + k)] = live
        return out


def dyn_dep(program, table, row, col):
    """The one cell (row, col) currently waits on, or None.

    Defined only for ternary rules with a resolved condition: a consumed
    condition defers to the continuation at the advanced offset, a failed
    one to the failure branch at the same offset.
    """
    if program.kind[row] != K_TERNARY:
        return None
    cv = table.read(program.tx[row], col)
    if cv == BOTTOM:
        return None
    if cv == FAIL:
        return (program.tz[row], col)
    return (program.ty[row], col + cv)


def fix(program, table, revdeps, byte, debug=False):
    """Append ``byte`` and restore the prefix-table fixed point.

    On entry the table must hold the fixed point for its current window
    and ``revdeps`` the matching reverse-dependency map; both are updated
    in place for the extended window.
    """
    assert revdeps.base == table.base
    table.append_column(byte)
    revdeps.append_column()
    last = table.end - 1
    work = [(i, last) for i in program.simple_rows]
    if debug:
        _drain_checked(program, table, revdeps, work)
    else:
        _drain(program, table, revdeps, work)


def _drain(program, table, revdeps, work):
    # The hot loop: same logic as _drain_checked and apply_F, but with
    # containers opened up and bounds implied by the loop invariants.
    kind, term = program.kind, program.term
    tx, ty, tz = program.tx, program.ty, program.tz
    cond_inv = program.condition_inverse
    base = table.base
    end = table.end
    citems = table.cols.items
    coff = table.cols.skip - base
    witems = table.window.items
    woff = table.window.skip - base
    ritems = revdeps.cols.items
    roff = revdeps.cols.skip - base
    rby = table.resolved_by_row
    resolved = 0
    while work:
        p, q = work.pop()
        col = citems[q + coff]
        k = kind[p]
        if k == K_TERNARY:
            cv = col[tx[p]]
            if cv == FAIL:
                v = col[tz[p]]
            elif cv >= 0:
                j2 = q + cv
                yv = citems[j2 + coff][ty[p]] if j2 < end else BOTTOM
                if yv >= 0:
                    v = cv + yv
                else:
                    v = FAIL
                    assert yv == FAIL, f"popped unresolvable cell ({p},{q})"
            else:
                raise AssertionError(f"popped unresolvable cell ({p},{q})")
        elif k == K_TERM:
            v = 1 if witems[q + woff] == term[p] else FAIL
        elif k == K_EPS:
            v = 0
        else:
            v = FAIL
        assert col[p] == BOTTOM, f"cell ({p},{q}) set twice"
        assert v != BOTTOM
        col[p] = v
        resolved += 1
        rby[p] += 1

        cur = ritems[q + roff][p]
        if cur is not None:
            if type(cur) is tuple:
                if cur[1] >= base:
                    work.append(cur)
            else:
                for e in cur:
                    if e[1] >= base:
                        work.append(e)

        for i2 in cond_inv[p]:
            if v == FAIL:
                kk, ll = tz[i2], q
            else:
                kk, ll = ty[i2], q + v
            rslot = ritems[ll + roff]
            cur = rslot[kk]
            if cur is None:
                rslot[kk] = (i2, q)
            elif type(cur) is tuple:
                rslot[kk] = [cur, (i2, q)]
            else:
                cur.append((i2, q))
            if ll < end and citems[ll + coff][kk] != BOTTOM:
                work.append((i2, q))
    table.resolved_total += resolved


def _drain_checked(program, table, revdeps, work):
    # Reference loop: plain table operations plus the loop invariants
    # (work list = the recomputed work set, revdeps = dependency inverse).
    cond_inv = program.condition_inverse
    ty, tz = program.ty, program.tz
    while work:
        _check_loop_invariant(program, table, revdeps, work)
        p, q = work.pop()
        v = apply_F(program, table, p, q)
        assert v != BOTTOM, f"popped unresolvable cell ({p},{q})"
        table.set(p, q, v)
        waiters = revdeps.waiters(p, q)
        if waiters:
            work.extend(waiters)
        for i2 in cond_inv[p]:
            if v == FAIL:
                k, l = tz[i2], q
            else:
                k, l = ty[i2], q + v
            revdeps.add(k, l, i2, q)
            if table.read(k, l) != BOTTOM:
                work.append((i2, q))
    _check_loop_invariant(program, table, revdeps, work)


def delta_naive(program, table):
    """The work set, recomputed from scratch: unresolved cells of the
    stored window that one operator application would resolve. Test
    support; the incremental loop must agree with it."""
    out = set()
    for col in range(table.base, table.end):
        for row in range(len(program.rules)):
            if table.read(row, col) != BOTTOM:
                continue
            if program.kind[row] != K_TERNARY:
                out.add((row, col))
                continue
            dep = dyn_dep(program, table, row, col)
            if dep is not None and table.read(*dep) != BOTTOM:
                out.add((row, col))
    return out


def _check_loop_invariant(program, table, revdeps, work):
    ws = set(work)
    assert len(ws) == len(work), "duplicate work items"
    assert ws == delta_naive(program, table), "work list out of sync"
    want = {}
    for col in range(table.base, table.end):
        for row in range(len(program.rules)):
            dep = dyn_dep(program, table, row, col)
            if dep is not None:
                want.setdefault(dep, []).append((row, col))
    have = revdeps.as_mapping()
    assert {k: sorted(v) for k, v in want.items()} == have, "revdeps out of sync"
