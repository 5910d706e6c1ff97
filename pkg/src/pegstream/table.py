"""Prefix tables over the entry lattice, and the single-cell table operator.

A cell holds one of three values, encoded as a plain int so the engines
can compare and store them cheaply:

    BOTTOM (-2)   unresolved
    FAIL   (-1)   the rule fails at this position
    m >= 0        the rule succeeds consuming m input symbols

The only order is BOTTOM below everything else; FAIL and the consumed
counts are mutually incomparable, so a resolved cell never changes.

A PrefixTable stores a contiguous run of columns starting at an absolute
``base`` offset. Truncation advances the base; reads keep using absolute
column numbers, columns past the stored ones read as BOTTOM, and columns
below the base are gone for good (reading them is a driver bug).
"""

from __future__ import annotations

from .grammar import K_EPS, K_FAIL, K_TERM

BOTTOM = -2
FAIL = -1

#: Sentinel fed after the last input byte; outside 0..255 so no terminal
#: rule can ever match it.
END_MARK = 256


def consumed(m):
    assert m >= 0
    return m


def is_consumed(v):
    return v >= 0


def entry_le(a, b):
    """The lattice order: a below-or-equal b."""
    return a == BOTTOM or a == b


def entry_str(v):
    if v == BOTTOM:
        return "_"
    if v == FAIL:
        return "f"
    return str(v)


def format_rows(names, ncols, get):
    """The shared dump format: one ``NAME: v0 v1 ... vk`` line per rule."""
    lines = []
    for i, name in enumerate(names):
        cells = " ".join(entry_str(get(i, j)) for j in range(ncols))
        lines.append(f"{name}: {cells}" if ncols else f"{name}:")
    return "\n".join(lines) + "\n"


class _ShiftList:
    """A list logically consumed from the front; compacts occasionally."""

    __slots__ = ("items", "skip")

    def __init__(self):
        self.items = []
        self.skip = 0

    def __len__(self):
        return len(self.items) - self.skip

    def __getitem__(self, k):
        return self.items[self.skip + k]

    def append(self, x):
        self.items.append(x)

    def drop(self, m):
        self.skip += m
        if self.skip > 64 and self.skip * 2 > len(self.items):
            del self.items[: self.skip]
            self.skip = 0


class PrefixTable:
    """Growable/shrinkable column store for one in-progress parse."""

    def __init__(self, nrules):
        self.nrules = nrules
        self.base = 0
        self.cols = _ShiftList()
        self.window = _ShiftList()  # byte per stored column (END_MARK allowed)
        self.resolved_total = 0
        self.resolved_by_row = [0] * nrules

    def __len__(self):
        return len(self.cols)

    @property
    def end(self):
        """First absolute column with no stored data."""
        return self.base + len(self.cols)

    def read(self, row, col):
        k = col - self.base
        assert k >= 0, f"read of discarded column {col} (base {self.base})"
        if k >= len(self.cols):
            return BOTTOM
        return self.cols[k][row]

    def set(self, row, col, v):
        k = col - self.base
        assert 0 <= k < len(self.cols), f"set outside stored columns: {col}"
        column = self.cols[k]
        assert column[row] == BOTTOM, f"cell ({row},{col}) set twice"
        assert v != BOTTOM
        column[row] = v
        self.resolved_total += 1
        self.resolved_by_row[row] += 1

    def byte_at(self, col):
        k = col - self.base
        if 0 <= k < len(self.window):
            return self.window[k]
        return None

    def append_column(self, byte):
        self.cols.append([BOTTOM] * self.nrules)
        self.window.append(byte)

    def truncate(self, m):
        assert 0 <= m <= len(self.cols)
        self.cols.drop(m)
        self.window.drop(m)
        self.base += m

    def clone(self):
        t = PrefixTable(self.nrules)
        t.base = self.base
        for k in range(len(self.cols)):
            t.cols.append(list(self.cols[k]))
            t.window.append(self.window[k])
        t.resolved_total = self.resolved_total
        t.resolved_by_row = list(self.resolved_by_row)
        return t

    def dump(self, names):
        return format_rows(names, len(self.cols), lambda i, k: self.cols[k][i])


def apply_F(program, table, row, col):
    """Value of the table operator at one cell of the stored window.

    Reads go through the table, so conditions pointing past the stored
    columns see BOTTOM and the result stays BOTTOM until more input
    arrives. The caller must keep ``col`` inside the updatable region
    (base <= col < end).
    """
    assert table.base <= col < table.end
    k = program.kind[row]
    if k == K_EPS:
        return 0
    if k == K_FAIL:
        return FAIL
    if k == K_TERM:
        return 1 if table.byte_at(col) == program.term[row] else FAIL
    cv = table.read(program.tx[row], col)
    if cv == BOTTOM:
        return BOTTOM
    if cv == FAIL:
        return table.read(program.tz[row], col)
    yv = table.read(program.ty[row], col + cv)
    if yv == BOTTOM:
        return BOTTOM
    if yv == FAIL:
        return FAIL
    return cv + yv
