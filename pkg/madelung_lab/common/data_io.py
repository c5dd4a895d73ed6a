"""Data I/O for snapshots (CSV), reports (JSON), sample logs (JSONL) and gnuplot tables."""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import jsonlines
import numpy as np
import pandas as pd

from ..core.errors import InvalidGridError
from ..fs.base import FileSystem
from ..fs.local import LocalFileSystem
from ..numerics.madelung import HydroState
from ..numerics.spectral_core import ComplexField, Grid1D
from .utils import to_jsonable


SNAPSHOT_MAGIC = "# madelung-lab-snapshot v1"
_HEADER_RE = re.compile(
    r"^# madelung-lab-snapshot v1 L=(?P<L>\S+) N=(?P<N>\d+) kind=(?P<kind>field|state) t=(?P<t>\S+)$")
_COLUMNS = {"field": ["x", "re_q", "im_q"], "state": ["x", "rho", "v"]}
DIAGNOSTIC_COLUMNS = ["t", "energy", "min_modulus_or_density", "mass_like"]


@dataclass(frozen=True)
class Snapshot:
    grid: Grid1D
    t: float
    value: Union[ComplexField, HydroState]

    @property
    def kind(self) -> str:
        return "state" if isinstance(self.value, HydroState) else "field"


class DataReader:
    """Reader for the artifact formats."""

    def __init__(self, fs: Optional[FileSystem] = None):
        self.fs = fs or LocalFileSystem()

    def _read_text(self, path: str) -> str:
        with self.fs.open(path, "rb") as f:
            return f.read().decode("utf-8")

    def read_snapshot(self, path: str) -> Snapshot:
        if not self.fs.exists(path):
            raise InvalidGridError(f"snapshot file not found: {path}")
        text = self._read_text(path)
        header, _, body = text.partition("\n")
        match = _HEADER_RE.match(header.strip())
        if match is None:
            raise InvalidGridError(f"{path}: missing or malformed snapshot header: {header[:80]!r}")
        kind = match.group("kind")
        grid = Grid1D(float(match.group("L")), int(match.group("N")))
        df = pd.read_csv(io.StringIO(body), float_precision="round_trip")
        if list(df.columns) != _COLUMNS[kind]:
            raise InvalidGridError(f"{path}: columns {list(df.columns)} != {_COLUMNS[kind]}")
        if len(df) != grid.n_points:
            raise InvalidGridError(f"{path}: {len(df)} rows but header says N={grid.n_points}")
        x = df["x"].to_numpy(dtype=float)
        if not np.allclose(x, grid.x, rtol=0.0, atol=1e-9 * grid.length):
            raise InvalidGridError(f"{path}: x column does not match the grid nodes")
        if kind == "field":
            value: Union[ComplexField, HydroState] = ComplexField(
                grid, df["re_q"].to_numpy(dtype=float) + 1j * df["im_q"].to_numpy(dtype=float))
        else:
            value = HydroState(grid, df["rho"].to_numpy(dtype=float), df["v"].to_numpy(dtype=float))
        return Snapshot(grid=grid, t=float(match.group("t")), value=value)

    def read_json(self, path: str) -> Dict[str, Any]:
        return json.loads(self._read_text(path))

    def read_jsonl(self, path: str) -> List[Dict[str, Any]]:
        with jsonlines.Reader(io.StringIO(self._read_text(path))) as reader:
            return list(reader)

    def read_frame(self, path: str) -> pd.DataFrame:
        return pd.read_csv(io.StringIO(self._read_text(path)))


class DataWriter:
    """Writer for the artifact formats; every file goes through an atomic replace."""

    def __init__(self, fs: Optional[FileSystem] = None):
        self.fs = fs or LocalFileSystem()

    def write_snapshot(self, path: str, value: Union[ComplexField, HydroState], t: float = 0.0) -> str:
        grid = value.grid
        if isinstance(value, HydroState):
            kind = "state"
            df = pd.DataFrame({"x": grid.x, "rho": value.rho, "v": value.v})
        else:
            kind = "field"
            samples = np.asarray(value.samples)
            df = pd.DataFrame({"x": grid.x, "re_q": np.real(samples), "im_q": np.imag(samples)})
        header = f"{SNAPSHOT_MAGIC} L={grid.length!r} N={grid.n_points} kind={kind} t={float(t)!r}\n"
        return self.fs.write_atomic(path, (header + df.to_csv(index=False, float_format="%.17g")).encode("utf-8"))

    def write_json(self, path: str, obj: Any) -> str:
        text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False)
        return self.fs.write_atomic(path, (text + "\n").encode("utf-8"))

    def write_jsonl(self, path: str, records: Iterable[Dict[str, Any]]) -> str:
        buf = io.StringIO()
        with jsonlines.Writer(buf, sort_keys=True) as writer:
            writer.write_all(to_jsonable(list(records)))
            text = buf.getvalue()
        return self.fs.write_atomic(path, text.encode("utf-8"))

    def write_frame(self, path: str, df: pd.DataFrame) -> str:
        return self.fs.write_atomic(path, df.to_csv(index=False, float_format="%.17g").encode("utf-8"))

    def write_dat(self, path: str, df: pd.DataFrame) -> str:
        """Whitespace-separated columns with a commented header line."""
        body = df.to_csv(sep=" ", index=False, header=False, float_format="%.12e")
        return self.fs.write_atomic(path, ("# " + " ".join(df.columns) + "\n" + body).encode("utf-8"))

    def write_trajectory(self, directory: str, trajectory, manifest: Dict[str, Any],
                         write_dat: bool = True) -> Dict[str, str]:
        """manifest.json, snapshot_<idx>.csv, diagnostics.csv and optionally diagnostics.dat."""
        out = Path(directory)
        self.fs.makedirs(str(out))
        paths: Dict[str, str] = {}
        for idx, (t, state) in enumerate(zip(trajectory.times, trajectory.states)):
            self.write_snapshot(str(out / f"snapshot_{idx:05d}.csv"), state, t)
        frame = trajectory.diagnostics_frame()
        paths["diagnostics"] = self.write_frame(str(out / "diagnostics.csv"), frame)
        if write_dat:
            paths["diagnostics_dat"] = self.write_dat(str(out / "diagnostics.dat"), frame)
        full_manifest = {
            **manifest,
            "grid": {"L": trajectory.grid.length, "N": trajectory.grid.n_points},
            "scheme": trajectory.config.scheme,
            "sim": trajectory.config.to_dict(),
            "snapshots": len(trajectory.times),
        }
        paths["manifest"] = self.write_json(str(out / "manifest.json"), full_manifest)
        return paths


def read_snapshot(path: str, fs: Optional[FileSystem] = None) -> Snapshot:
    return DataReader(fs).read_snapshot(path)


def write_snapshot(path: str, value: Union[ComplexField, HydroState], t: float = 0.0,
                   fs: Optional[FileSystem] = None) -> str:
    return DataWriter(fs).write_snapshot(path, value, t)
