"""Binary state snapshots: fixed-size text header, raw float64 payload.

Layout: a 512-byte ASCII header (magic line, then key=value lines, space
padded), followed by the u block and the v block, each n^3 little-endian
float64 values with x varying fastest. Round-trips are bit exact.
"""
from dataclasses import dataclass

import numpy as np

from .dynamics import MediumState, ModelParams
from .grid import NONPERIODIC, PERIODIC, BoundarySpec, FaceBC, ScalarField, make_grid

MAGIC = "EMTOPO-SNAP"
VERSION = 1
HEADER_SIZE = 512


class SnapshotError(ValueError):
    pass


@dataclass
class SnapshotData:
    state: MediumState
    params: ModelParams
    bc: BoundarySpec


def _bc_fields(bc):
    kinds = []
    uvals = []
    vvals = []
    for ax in range(3):
        face = bc.faces[2 * ax]
        kinds.append(face.kind)
        if face.kind == "dirichlet":
            uvals.append("%.17g" % face.values["u"])
            vvals.append("%.17g" % face.values["v"])
        else:
            uvals.append("-")
            vvals.append("-")
    return ",".join(kinds), ",".join(uvals), ",".join(vvals)


def write_snapshot(path, state, params, bc):
    """Write one medium state with enough metadata to rebuild the run
    context. Both faces of an axis must share one boundary kind."""
    grid = state.grid
    bc.validate(grid)
    kinds, uvals, vvals = _bc_fields(bc)
    lines = [
        "%s %d" % (MAGIC, VERSION),
        "n=%d" % grid.n,
        "L=%.17g" % grid.L,
        "t=%.17g" % state.t,
        "eps=%.17g beta=%.17g gamma=%.17g Du=%.17g Dv=%.17g"
        % (params.eps, params.beta, params.gamma, params.Du, params.Dv),
        "bc=%s" % kinds,
        "bc_u=%s" % uvals,
        "bc_v=%s" % vvals,
    ]
    header = "\n".join(lines) + "\n"
    raw = header.encode("ascii")
    if len(raw) > HEADER_SIZE:
        raise SnapshotError("header overflow (%d bytes)" % len(raw))
    raw = raw + b" " * (HEADER_SIZE - len(raw))
    with open(path, "wb") as fh:
        fh.write(raw)
        fh.write(np.asarray(state.u.values, dtype="<f8").flatten(order="F").tobytes())
        fh.write(np.asarray(state.v.values, dtype="<f8").flatten(order="F").tobytes())


def read_snapshot(path):
    """Read a snapshot written by write_snapshot; bit-exact payload."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise SnapshotError("file too short for a snapshot header")
    try:
        header = raw[:HEADER_SIZE].decode("ascii")
    except UnicodeDecodeError:
        raise SnapshotError("header is not ASCII text")
    lines = header.split("\n")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MAGIC:
        raise SnapshotError("bad magic %r (expected %r)" % (lines[0].strip(), MAGIC))
    if int(magic[1]) != VERSION:
        raise SnapshotError("unsupported snapshot version %s" % magic[1])
    kv = {}
    for line in lines[1:]:
        for tok in line.split():
            if "=" in tok:
                k, _, v = tok.partition("=")
                kv[k] = v
    try:
        n = int(kv["n"])
        L = float(kv["L"])
        t = float(kv["t"])
        params = ModelParams(
            float(kv["eps"]), float(kv["beta"]), float(kv["gamma"]),
            float(kv["Du"]), float(kv["Dv"]),
        )
        kinds = kv["bc"].split(",")
        uvals = kv["bc_u"].split(",")
        vvals = kv["bc_v"].split(",")
    except (KeyError, ValueError) as e:
        raise SnapshotError("malformed header field: %s" % e)
    expected = HEADER_SIZE + 2 * n * n * n * 8
    if len(raw) != expected:
        raise SnapshotError(
            "payload size mismatch: %d bytes, expected %d" % (len(raw), expected)
        )
    axis_bc = tuple(PERIODIC if k == "periodic" else NONPERIODIC for k in kinds)
    grid = make_grid(L, n, axis_bc)
    count = n * n * n
    u = np.frombuffer(raw, dtype="<f8", count=count, offset=HEADER_SIZE)
    v = np.frombuffer(raw, dtype="<f8", count=count, offset=HEADER_SIZE + 8 * count)
    u = np.asarray(u.reshape((n, n, n), order="F"), dtype=np.float64).copy(order="C")
    v = np.asarray(v.reshape((n, n, n), order="F"), dtype=np.float64).copy(order="C")
    faces = []
    for ax in range(3):
        if kinds[ax] == "dirichlet":
            faces.extend(
                [FaceBC("dirichlet", {"u": float(uvals[ax]), "v": float(vvals[ax])})] * 2
            )
        else:
            faces.extend([FaceBC(kinds[ax])] * 2)
    bc = BoundarySpec(tuple(faces))
    state = MediumState(ScalarField(grid, u), ScalarField(grid, v), t)
    return SnapshotData(state, params, bc)
