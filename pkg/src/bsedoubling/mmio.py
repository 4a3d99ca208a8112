"""Minimal Matrix Market reader/writer for dense complex matrices.

Writes the array variant (``%%MatrixMarket matrix array complex general``)
with full double precision; reads both the array and coordinate variants,
real or complex, general field.  Parse failures raise ParseError with the
offending line number.
"""

import numpy as np

from .errors import ParseError

_HEADER = "%%MatrixMarket"


def save_matrix(path, M, comments=()):
    """Write a dense complex matrix in array format.

    Extra ``comments`` (without the leading %) are placed right after the
    header and survive a round trip as provenance.
    """
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix array complex general\n")
        for line in comments:
            fh.write(f"%{line}\n")
        fh.write(f"{rows} {cols}\n")
        # column-major per the Matrix Market array convention
        for j in range(cols):
            for i in range(rows):
                z = M[i, j]
                fh.write(f"{z.real:.17g} {z.imag:.17g}\n")


def load_matrix(path):
    """Read a Matrix Market file, returning (matrix, comments)."""
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].strip().split()
    if len(header) != 5 or header[0] != _HEADER or header[1].lower() != "matrix":
        raise ParseError("malformed Matrix Market header", 1)
    layout, field, symmetry = (tok.lower() for tok in header[2:5])
    if layout not in ("array", "coordinate"):
        raise ParseError(f"unsupported layout {layout!r}", 1)
    if field not in ("real", "complex", "integer"):
        raise ParseError(f"unsupported field {field!r}", 1)
    if symmetry != "general":
        raise ParseError(f"unsupported symmetry {symmetry!r}", 1)

    comments = []
    idx = 1
    while idx < len(lines) and lines[idx].lstrip().startswith("%"):
        comments.append(lines[idx].lstrip()[1:].rstrip("\n"))
        idx += 1
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx >= len(lines):
        raise ParseError("missing size line", len(lines))

    size = lines[idx].split()
    lineno = idx + 1
    idx += 1
    complex_field = field == "complex"

    if layout == "array":
        if len(size) != 2:
            raise ParseError("array size line must have two integers", lineno)
        try:
            rows, cols = int(size[0]), int(size[1])
        except ValueError:
            raise ParseError("non-integer dimension", lineno) from None
        M = np.zeros((rows, cols), dtype=complex)
        count = 0
        for k in range(idx, len(lines)):
            text = lines[k].strip()
            if not text or text.startswith("%"):
                continue
            if count >= rows * cols:
                raise ParseError("more entries than rows*cols", k + 1)
            M[count % rows, count // rows] = _parse_value(text, complex_field, k + 1)
            count += 1
        if count != rows * cols:
            raise ParseError(
                f"expected {rows * cols} entries, found {count}", len(lines))
        return M, comments

    if len(size) != 3:
        raise ParseError("coordinate size line must have three integers", lineno)
    try:
        rows, cols, nnz = (int(tok) for tok in size)
    except ValueError:
        raise ParseError("non-integer dimension", lineno) from None
    M = np.zeros((rows, cols), dtype=complex)
    count = 0
    for k in range(idx, len(lines)):
        text = lines[k].strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) < 3:
            raise ParseError("coordinate entry needs row, col and value", k + 1)
        try:
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
        except ValueError:
            raise ParseError("non-integer coordinate", k + 1) from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise ParseError("coordinate out of range", k + 1)
        M[i, j] = _parse_value(" ".join(parts[2:]), complex_field, k + 1)
        count += 1
    if count != nnz:
        raise ParseError(f"expected {nnz} entries, found {count}", len(lines))
    return M, comments


def _parse_value(text, complex_field, lineno):
    parts = text.split()
    try:
        if complex_field:
            if len(parts) != 2:
                raise ValueError
            return complex(float(parts[0]), float(parts[1]))
        if len(parts) != 1:
            raise ValueError
        return complex(float(parts[0]), 0.0)
    except ValueError:
        raise ParseError(f"bad value {text!r}", lineno) from None
