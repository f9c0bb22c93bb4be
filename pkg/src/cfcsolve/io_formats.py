"""Block-sum text syntax and matrix (de)serialization.

Grammar (whitespace is ignored)::

    sum     := term ('+' term)*
    term    := block ('*' count)?
    block   := 'J' int | 'G' int '~'? | 'H' int '(' complex ')' '~'?

``complex`` is any scalar accepted by :func:`parse_scalar` that is exact,
for example ``-1``, ``1/2``, ``2i``, ``1-3/4i`` or ``-i``.
"""
from __future__ import annotations

import csv
import io
import json
import sys
import warnings
from pathlib import Path

from .blocks import Block, BlockSum, Kind, canonicalize_mu, validate
from .errors import InvalidBlock, ParseError
from .kernel import GQ, Matrix, format_scalar, parse_scalar


class MuReplacedWarning(UserWarning):
    """mu was replaced by its inverse to reach the canonical representative."""


def format_block(b: Block) -> str:
    tilde = "~" if b.is_tilde else ""
    if b.family == "H":
        return f"H{b.size}({format_scalar(b.mu)}){tilde}"
    return f"{b.family}{b.size}{tilde}"


def format_blocksum(s: BlockSum) -> str:
    if s.is_empty():
        return ""
    parts = []
    for b, m in s.terms:
        parts.append(format_block(b) + (f"*{m}" if m > 1 else ""))
    return " + ".join(parts)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {got!r}", position=self.pos)
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in "0123456789":
            self.pos += 1
        if start == self.pos:
            got = self.text[start] if start < len(self.text) else "end of input"
            raise ParseError(f"expected an integer, found {got!r}", position=start)
        digits = self.text[start:self.pos]
        if len(digits) > 6:
            raise ParseError("integer too large", position=start)
        return int(digits)


def _parse_block(sc: _Scanner) -> Block:
    start = sc.pos
    letter = sc.peek()
    if letter not in ("J", "G", "H"):
        raise ParseError(f"expected a block letter J, G or H, found {letter or 'end of input'!r}",
                         position=sc.pos)
    sc.pos += 1
    size = sc.integer()
    if size < 1:
        raise ParseError("block size must be >= 1", position=start)
    if letter == "J":
        return Block(Kind.J, size)
    if letter == "G":
        if sc.peek() == "~":
            sc.pos += 1
            return Block(Kind.GAMMA_TILDE, size)
        return Block(Kind.GAMMA, size)
    if size % 2:
        raise ParseError(f"H block size must be even, got {size}", position=start)
    sc.take("(")
    close = sc.text.find(")", sc.pos)
    if close < 0:
        raise ParseError("missing ')'", position=sc.pos)
    raw = sc.text[sc.pos:close]
    try:
        mu = parse_scalar(raw)
    except ParseError as exc:
        raise ParseError(f"bad mu {raw.strip()!r}", position=sc.pos) from exc
    if not isinstance(mu, GQ):
        raise ParseError(f"mu must be an exact Gaussian rational, got {raw.strip()!r}",
                         position=sc.pos)
    sc.pos = close + 1
    tilde = False
    if sc.peek() == "~":
        sc.pos += 1
        tilde = True
    return Block(Kind.H_TILDE if tilde else Kind.H, size, mu)


def parse_blocksum(text: str, *, canonicalize: bool = True, notes: list | None = None) -> BlockSum:
    """Parse block-sum text into a validated :class:`BlockSum`.

    When ``canonicalize`` is set, an H block whose mu is not the canonical
    representative of ``{mu, 1/mu}`` is rewritten, a :class:`MuReplacedWarning`
    is issued and a note is appended to ``notes``.
    """
    if not isinstance(text, str):
        raise ParseError("block-sum text must be a string")
    sc = _Scanner(text)
    if not sc.peek():
        raise ParseError("empty block sum", position=0)
    blocks = []
    while True:
        b = _parse_block(sc)
        count = 1
        if sc.peek() == "*":
            sc.pos += 1
            count = sc.integer()
            if count < 1:
                raise ParseError("multiplicity must be >= 1", position=sc.pos)
        v = validate(b)
        if v:
            raise InvalidBlock(f"{format_block(b)} violates {_constraint_name(v)}")
        if canonicalize and b.family == "H":
            mu = canonicalize_mu(b.mu, b.half)
            if mu != b.mu:
                msg = (f"{format_block(b)}: mu replaced by its inverse "
                       f"{format_scalar(mu)} (congruent block)")
                warnings.warn(msg, MuReplacedWarning, stacklevel=2)
                if notes is not None:
                    notes.append(msg)
                b = Block(b.kind, b.size, mu)
        blocks.extend([b] * count)
        nxt = sc.peek()
        if not nxt:
            break
        if nxt != "+":
            raise ParseError(f"expected '+' or end of input, found {nxt!r}", position=sc.pos)
        sc.pos += 1
    return BlockSum.from_blocks(blocks)


def _constraint_name(v: str) -> str:
    if v == "μ = (−1)^{k+1}":
        return "μ≠(−1)^{k+1}"
    if v == "μ = 0":
        return "μ≠0"
    return v


# -- matrices ----------------------------------------------------------------

def scalar_to_json(x):
    return format_scalar(x)


def scalar_from_json(obj, row=None, col=None):
    try:
        if isinstance(obj, str):
            return parse_scalar(obj)
        if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
            re = parse_scalar(str(obj.get("re", "0")))
            im = parse_scalar(str(obj.get("im", "0")))
            if isinstance(re, GQ) and isinstance(im, GQ):
                if re.im or im.im:
                    raise ParseError("re/im parts must be real")
                return GQ(re.re, im.re)
            return complex(re) + 1j * complex(im)
        if isinstance(obj, int) and not isinstance(obj, bool):
            return GQ(obj)
    except ParseError as exc:
        raise ParseError(f"malformed entry {obj!r}", row=row, col=col) from exc
    raise ParseError(f"malformed entry {obj!r}", row=row, col=col)


def matrix_to_json(m: Matrix) -> list:
    return [[scalar_to_json(x) for x in r] for r in m.tolist()]


def matrix_from_json(obj) -> Matrix:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ParseError("matrix JSON must be an array of rows")
    rows = [[scalar_from_json(x, i + 1, j + 1) for j, x in enumerate(r)]
            for i, r in enumerate(obj)]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("ragged matrix rows")
    return Matrix(rows)


def _open_text(target, mode):
    if target == "-":
        return sys.stdin if "r" in mode else sys.stdout, False
    if isinstance(target, (str, Path)):
        return open(target, mode, newline="" if "w" in mode else None), True
    return target, False


def _guess_format(target, fmt):
    if fmt:
        return fmt
    if isinstance(target, (str, Path)) and str(target).lower().endswith(".csv"):
        return "csv"
    return "json"


def read_matrix(source, fmt: str | None = None) -> Matrix:
    fmt = _guess_format(source, fmt)
    fh, close = _open_text(source, "r")
    try:
        text = fh.read()
    finally:
        if close:
            fh.close()
    return loads_matrix(text, fmt)


def loads_matrix(text: str, fmt: str = "json") -> Matrix:
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", position=exc.pos) from exc
        if isinstance(obj, dict):
            # accept documents carrying a matrix under a well-known key
            for key in ("X", "matrix", "P"):
                if key in obj:
                    obj = obj[key]
                    break
        return matrix_from_json(obj)
    if fmt == "csv":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        return matrix_from_json([[c.strip() for c in r] for r in rows])
    raise ValueError(f"unknown matrix format {fmt!r}")


def dumps_matrix(m: Matrix, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(matrix_to_json(m))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in matrix_to_json(m):
            w.writerow(r)
        return buf.getvalue()
    raise ValueError(f"unknown matrix format {fmt!r}")


def write_matrix(m: Matrix, target, fmt: str | None = None) -> None:
    fmt = _guess_format(target, fmt)
    fh, close = _open_text(target, "w")
    try:
        fh.write(dumps_matrix(m, fmt))
        if fmt == "json":
            fh.write("\n")
    finally:
        if close:
            fh.close()


def io_matrix(op: str, target, fmt: str | None = None, m: Matrix | None = None):
    """``io_matrix('read', path)`` or ``io_matrix('write', path, m=M)``."""
    if op == "read":
        return read_matrix(target, fmt)
    if op == "write":
        if m is None:
            raise ValueError("write needs a matrix")
        return write_matrix(m, target, fmt)
    raise ValueError(f"unknown io operation {op!r}")
