"""Reader/writer for the Triangle ``.node`` / ``.ele`` text formats.

Only the subset used by dec2d is supported: 2D nodes with optional
attributes and at most one boundary marker column, and 3-node elements.
Files may be 0- or 1-based; the base is taken from the first node index and
applies to the element connectivity as well.  ``#`` starts a comment.
"""

import re

import numpy as np

from .exceptions import MeshFormatError

_TOKEN = re.compile(r"\S+")


def _records(text, source):
    """Yield ``(lineno, [(column, token), ...])`` for non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]
        if tokens:
            yield lineno, tokens


def _as_int(tok, source, lineno, what):
    col, s = tok
    try:
        return int(s)
    except ValueError:
        raise MeshFormatError(
            f"expected integer {what}, got {s!r}", source=source, line=lineno, column=col
        ) from None


def _as_float(tok, source, lineno, what):
    col, s = tok
    try:
        value = float(s)
    except ValueError:
        raise MeshFormatError(
            f"expected real {what}, got {s!r}", source=source, line=lineno, column=col
        ) from None
    if not np.isfinite(value):
        raise MeshFormatError(
            f"non-finite {what} {s!r}", source=source, line=lineno, column=col
        )
    return value


def _header(records, source, what):
    try:
        return next(records)
    except StopIteration:
        raise MeshFormatError(f"empty {what} file", source=source) from None


def parse_node(text, source="<node>"):
    """Parse ``.node`` text.

    Returns ``(vertices, markers, base)`` where ``vertices`` is an ``(n, 2)``
    float array, ``markers`` an ``(n,)`` int array (zeros if the file has no
    marker column) and ``base`` is 0 or 1.
    """
    records = _records(text, source)
    lineno, head = _header(records, source, "node")
    if len(head) < 2:
        raise MeshFormatError(
            "node header needs '<#nodes> 2 [<#attrs> [<#markers>]]'",
            source=source, line=lineno, column=head[0][0],
        )
    values = [_as_int(t, source, lineno, "header field") for t in head[:4]]
    n, dim = values[0], values[1]
    n_attr = values[2] if len(values) > 2 else 0
    n_mark = values[3] if len(values) > 3 else 0
    if dim != 2:
        raise MeshFormatError(
            f"only 2D nodes are supported, header says {dim}",
            source=source, line=lineno, column=head[1][0],
        )
    if n < 0 or n_attr < 0 or n_mark not in (0, 1):
        raise MeshFormatError("invalid node header counts", source=source, line=lineno, column=1)

    width = 3 + n_attr + n_mark
    vertices = np.empty((n, 2))
    markers = np.zeros(n, dtype=np.int64)
    base = None
    count = 0
    for lineno, toks in records:
        if count == n:
            raise MeshFormatError(
                f"more node rows than the {n} declared", source=source, line=lineno, column=1
            )
        if len(toks) != width:
            raise MeshFormatError(
                f"expected {width} fields, found {len(toks)}",
                source=source, line=lineno, column=toks[-1][0],
            )
        idx = _as_int(toks[0], source, lineno, "node index")
        if base is None:
            if idx not in (0, 1):
                raise MeshFormatError(
                    f"first node index must be 0 or 1, got {idx}",
                    source=source, line=lineno, column=toks[0][0],
                )
            base = idx
        if idx != base + count:
            raise MeshFormatError(
                f"node index {idx} out of sequence (expected {base + count})",
                source=source, line=lineno, column=toks[0][0],
            )
        vertices[count, 0] = _as_float(toks[1], source, lineno, "x coordinate")
        vertices[count, 1] = _as_float(toks[2], source, lineno, "y coordinate")
        if n_mark:
            markers[count] = _as_int(toks[-1], source, lineno, "boundary marker")
        count += 1
    if count != n:
        raise MeshFormatError(f"header declares {n} nodes, found {count}", source=source)
    return vertices, markers, (0 if base is None else base)


def parse_ele(text, base=0, source="<ele>"):
    """Parse ``.ele`` text into an ``(m, 3)`` array of 0-based vertex indices."""
    records = _records(text, source)
    lineno, head = _header(records, source, "ele")
    values = [_as_int(t, source, lineno, "header field") for t in head[:3]]
    if len(values) < 2:
        raise MeshFormatError(
            "ele header needs '<#triangles> 3 [<#attrs>]'", source=source, line=lineno, column=1
        )
    m, per = values[0], values[1]
    n_attr = values[2] if len(values) > 2 else 0
    if per != 3:
        raise MeshFormatError(
            f"only 3-node triangles are supported, header says {per}",
            source=source, line=lineno, column=head[1][0],
        )
    if m < 0 or n_attr < 0:
        raise MeshFormatError("invalid ele header counts", source=source, line=lineno, column=1)

    width = 4 + n_attr
    triangles = np.empty((m, 3), dtype=np.int64)
    first = None
    count = 0
    for lineno, toks in records:
        if count == m:
            raise MeshFormatError(
                f"more element rows than the {m} declared", source=source, line=lineno, column=1
            )
        if len(toks) != width:
            raise MeshFormatError(
                f"expected {width} fields, found {len(toks)}",
                source=source, line=lineno, column=toks[-1][0],
            )
        idx = _as_int(toks[0], source, lineno, "element index")
        if first is None:
            first = idx
        if idx != first + count:
            raise MeshFormatError(
                f"element index {idx} out of sequence (expected {first + count})",
                source=source, line=lineno, column=toks[0][0],
            )
        for k in range(3):
            triangles[count, k] = _as_int(toks[1 + k], source, lineno, "vertex index") - base
        count += 1
    if count != m:
        raise MeshFormatError(f"header declares {m} triangles, found {count}", source=source)
    return triangles


def format_node(vertices, markers=None):
    """Render 0-based ``.node`` text; coordinates use 17 significant digits."""
    n = len(vertices)
    has_markers = markers is not None
    lines = [f"{n} 2 0 {1 if has_markers else 0}"]
    for i, (x, y) in enumerate(vertices):
        row = f"{i} {x:.17g} {y:.17g}"
        if has_markers:
            row += f" {int(markers[i])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def format_ele(triangles):
    """Render 0-based ``.ele`` text."""
    lines = [f"{len(triangles)} 3 0"]
    for t, (a, b, c) in enumerate(triangles):
        lines.append(f"{t} {a} {b} {c}")
    return "\n".join(lines) + "\n"
