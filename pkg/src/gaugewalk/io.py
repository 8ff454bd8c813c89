"""On-disk formats: CSV dumps, the binary state checkpoint, run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .lattice import GaugeField, LatticeSpec, curvature_slice
from .walker import WalkState

_CHECKPOINT_HEADER = struct.Struct("<iiid")  # N, p_max, j, epsilon


def write_state_csv(path, positions: np.ndarray, values: np.ndarray, origin: str) -> None:
    """Shared walk/continuum state schema: p, x_p, re/im of each component,
    per-site probability, plus an origin flag ('walk' or 'dirac')."""
    values = np.asarray(values)
    n, ncomp = values.shape
    p_max = (n - 1) // 2
    header = ["p", "x_p"]
    for c in range(ncomp):
        header += [f"re_{c}", f"im_{c}"]
    header += ["prob", "origin"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(n):
            row = [i - p_max, repr(float(positions[i]))]
            for c in range(ncomp):
                row += [repr(float(values[i, c].real)), repr(float(values[i, c].imag))]
            row += [repr(float(np.sum(np.abs(values[i]) ** 2))), origin]
            w.writerow(row)


def write_checkpoint(path, state: WalkState) -> None:
    """Header (N, p_max, j, eps) then raw little-endian float64 (re, im) pairs."""
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_HEADER.pack(state.dim, state.spec.p_max, state.j, state.spec.epsilon))
        fh.write(np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes())


def read_checkpoint(path) -> WalkState:
    with open(path, "rb") as fh:
        dim, p_max, j, eps = _CHECKPOINT_HEADER.unpack(fh.read(_CHECKPOINT_HEADER.size))
        raw = fh.read()
    amps = np.frombuffer(raw, dtype="<c16").reshape(2 * p_max + 1, 2 * dim)
    spec = LatticeSpec(eps, p_max, max(j, 2))
    return WalkState(spec, dim, j, amps.copy())


def _matrix_columns(prefix: str, dim: int) -> list[str]:
    cols = []
    for r in range(dim):
        for c in range(dim):
            cols += [f"re_{prefix}{r}{c}", f"im_{prefix}{r}{c}"]
    return cols


def write_gauge_field_csv(path, field: GaugeField, j_range=None) -> None:
    """Rows (j, p, entries of P then Q, re/im interleaved)."""
    spec = field.spec
    j_range = range(spec.j_max + 1) if j_range is None else j_range
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "p"] + _matrix_columns("P", field.dim) + _matrix_columns("Q", field.dim))
        for j in j_range:
            pj, qj = field.P(j), field.Q(j)
            for i in range(spec.n_sites):
                row = [j, i - spec.p_max]
                for m in (pj[i], qj[i]):
                    for v in m.ravel():
                        row += [repr(float(v.real)), repr(float(v.imag))]
                w.writerow(row)


def write_curvature_csv(path, field: GaugeField, j_range=None) -> None:
    spec = field.spec
    j_range = range(1, spec.j_max) if j_range is None else j_range
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "p"] + _matrix_columns("F", field.dim))
        for j in j_range:
            fj = curvature_slice(field, j)
            for i in range(spec.n_sites):
                row = [j, i - spec.p_max]
                for v in fj[i].ravel():
                    row += [repr(float(v.real)), repr(float(v.imag))]
                w.writerow(row)


def write_convergence_csv(path, epsilons, delta_re, delta_im, running_slopes) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["epsilon", "delta_re_minus", "delta_im_minus", "slope_running"])
        for row in zip(epsilons, delta_re, delta_im, running_slopes):
            w.writerow([repr(float(v)) if v == v else "" for v in row])


def write_trajectory_csv(path, times, xbar_walk, x_classical, e_ym) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "xbar_walk", "x_classical", "E_ym"])
        for t, xw, xc in zip(times, xbar_walk, x_classical):
            w.writerow([repr(float(t)), repr(float(xw)), repr(float(xc)), repr(float(e_ym))])


def write_classical_csv(path, times, states) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "p", "I1", "I2", "I3"])
        for t, s in zip(times, states):
            w.writerow([repr(float(t)), repr(float(s.x)), repr(float(s.p))]
                       + [repr(float(v)) for v in s.isospin])


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, config: dict, artifacts: list) -> Path:
    """Config echo plus sha256 checksums of every artifact file."""
    out_dir = Path(out_dir)
    manifest = {
        "config": config,
        "artifacts": {Path(a).name: sha256_file(a) for a in artifacts},
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
