"""Binary snapshot format for solver states.

Layout of a snapshot file:

    5 bytes   magic b"ADMB1"
    8 bytes   header length, unsigned little-endian
    N bytes   UTF-8 JSON header: format, version, grid, physics, time,
              and the ordered field list
    payload   per field, the retained coefficients in lexicographic
              (k1, k2, k3) wavenumber order, each mode stored as
              little-endian float64 (real, imag)

Coefficients outside the retained lattice are identically zero and are
not stored; Hermitian partners are both stored, keeping reads free of
reconstruction logic.  Floats in the header are emitted by repr and
round-trip exactly, so write followed by read is bit-faithful.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .deconv import DeconvolutionSpec
from .dynamics import ModelParams
from .spectral import (SpectralScalarField, SpectralVectorField, TorusGrid,
                       build_grid)
from .stepping import SolverState

__all__ = ["MAGIC", "SnapshotFormatError", "write_snapshot", "read_snapshot"]

MAGIC = b"ADMB1"
FIELD_NAMES = ("w0", "w1", "w2", "rho")


class SnapshotFormatError(OSError):
    """Snapshot file is truncated, corrupt, or not a snapshot."""


def _mode_layout(grid: TorusGrid):
    """Storage indices of retained modes, lexicographic in wavenumber."""
    where = np.argwhere(grid.mode_mask)
    k = np.stack([grid.k_index[i][grid.mode_mask] for i in range(3)])
    # lexsort treats its last key as primary
    order = np.lexsort((k[2], k[1], k[0]))
    ordered = where[order]
    return tuple(ordered.T)


def _pack_field(coeffs: np.ndarray, layout) -> bytes:
    modes = coeffs[layout]
    flat = np.empty((modes.size, 2), dtype="<f8")
    flat[:, 0] = modes.real
    flat[:, 1] = modes.imag
    return flat.tobytes()


def _unpack_field(blob: bytes, grid: TorusGrid, layout) -> np.ndarray:
    flat = np.frombuffer(blob, dtype="<f8").reshape(-1, 2)
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[layout] = flat[:, 0] + 1j * flat[:, 1]
    return coeffs


def write_snapshot(path, state: SolverState) -> None:
    grid = state.w.grid
    params = state.params
    header = {
        "format": "ADMB1",
        "version": 1,
        "grid": {
            "box_length": grid.box_length,
            "modes_per_axis": grid.modes_per_axis,
            "truncation_radius": grid.truncation_radius,
        },
        "physics": {
            "alpha": params.deconv.alpha,
            "order": params.deconv.order,
            "nu": params.nu,
            "epsilon": params.epsilon,
        },
        "time": state.time,
        "fields": list(FIELD_NAMES),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    layout = _mode_layout(grid)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for i in range(3):
            fh.write(_pack_field(state.w.coeffs[i], layout))
        fh.write(_pack_field(state.rho.coeffs, layout))


def read_snapshot(path) -> SolverState:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[: len(MAGIC)] != MAGIC:
        raise SnapshotFormatError(f"{path}: not a snapshot file")
    offset = len(MAGIC)
    if len(raw) < offset + 8:
        raise SnapshotFormatError(f"{path}: truncated header length")
    (header_len,) = struct.unpack_from("<Q", raw, offset)
    offset += 8
    if len(raw) < offset + header_len:
        raise SnapshotFormatError(f"{path}: truncated header")
    try:
        header = json.loads(raw[offset: offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotFormatError(f"{path}: bad header: {exc}") from exc
    offset += header_len
    if header.get("format") != "ADMB1" or header.get("version") != 1:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version")
    if tuple(header.get("fields", ())) != FIELD_NAMES:
        raise SnapshotFormatError(f"{path}: unexpected field list")

    g = header["grid"]
    grid = build_grid(g["box_length"], g["modes_per_axis"],
                      truncation_radius=g["truncation_radius"])
    p = header["physics"]
    spec = DeconvolutionSpec(grid, alpha=p["alpha"], order=p["order"])
    params = ModelParams(deconv=spec, nu=p["nu"], epsilon=p["epsilon"])

    layout = _mode_layout(grid)
    per_field = int(grid.mode_mask.sum()) * 16
    if len(raw) != offset + 4 * per_field:
        raise SnapshotFormatError(f"{path}: payload size mismatch")
    cubes = []
    for _ in range(4):
        cubes.append(_unpack_field(raw[offset: offset + per_field],
                                   grid, layout))
        offset += per_field
    w = SpectralVectorField(grid, np.stack(cubes[:3]), copy=False,
                            divergence_free=True)
    rho = SpectralScalarField(grid, cubes[3], copy=False)
    return SolverState(w=w, rho=rho, time=header["time"], params=params)
