"""Embedded HTTP service for the online stage.

Endpoints:
    GET  /health   -> {"status": "ok"}
    GET  /model    -> parameter box, mode count, grid summary, hashes, spectrum
    POST /predict  -> summary + requested cross-section slices

Static operator-UI assets are served under / from an optional directory.
The bundle is immutable and shared read-only, so the threading server can
answer concurrent requests without locking.  Response JSON uses sorted keys
and compact separators, which makes identical requests byte-identical
(apart from the latency_ms field, which is measurement).
"""

from __future__ import annotations

import json
import math
import mimetypes
import posixpath
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .rom import RomBundle, predict

_MAX_BODY = 1 << 20


def model_info(bundle: RomBundle) -> dict:
    lam = bundle.basis.energy_spectrum
    total = float(lam.sum())
    cum = 0.0
    spectrum = []
    for i, v in enumerate(lam, start=1):
        cum += float(v)
        spectrum.append([i, float(v), cum / total if total > 0 else 0.0])
    return {
        "parameter_box": bundle.plan.box,
        "n_modes": bundle.n_modes,
        "t_inlet": bundle.t_inlet,
        "grid": bundle.grid.summary(),
        "hashes": bundle.hashes,
        "energy_spectrum": spectrum,
        "param_names": list(bundle.basis.param_scaler.names),
    }


def _bad(reason: str) -> tuple[int, dict]:
    return 400, {"error": reason}


def predict_payload(bundle: RomBundle, body: dict) -> tuple[int, dict]:
    """Validate a PredictRequest and build the PredictResponse."""
    if not isinstance(body, dict):
        return _bad("request body must be a JSON object")
    for key in ("t_ambient", "htc"):
        v = body.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            return _bad(f"{key} must be a finite number")
    n_stations = bundle.grid.n_stations
    slices = body.get("slices", [])
    if not isinstance(slices, list) or len(slices) > n_stations:
        return _bad(f"slices must be a list of at most {n_stations} station indices")
    for s in slices:
        if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < n_stations:
            return _bad(f"slice indices must be integers in [0, {n_stations})")

    result = predict(bundle, float(body["t_ambient"]), float(body["htc"]))
    grid = bundle.grid
    mask = grid.interior_mask().tolist()
    field_2d = result.field_2d
    out_slices = []
    slice_stats = []
    for s in slices:
        values = field_2d[s]
        out_slices.append(
            {
                "station": s,
                "z": float(grid.stations_z[s]),
                "nx": grid.nx,
                "ny": grid.ny,
                "dx": grid.dx,
                "values": values.tolist(),
                "mask": mask,
            }
        )
        slice_stats.append(
            {
                "station": s,
                "min": float(values.min()),
                "max": float(values.max()),
                "mean": float(values.mean()),
            }
        )
    payload = {
        "summary": result.summary,
        "slice_stats": slice_stats,
        "slices": out_slices,
        "surface_means": result.surface_means.tolist(),
        "stations_z": [float(z) for z in grid.stations_z],
        "extrapolation": result.extrapolated,
        "latency_ms": result.latency_s * 1e3,
    }
    if not np.all(np.isfinite(result.field)):
        return 500, {"error": "prediction produced non-finite values"}
    return 200, payload


class RomRequestHandler(BaseHTTPRequestHandler):
    server_version = "calibrom"
    protocol_version = "HTTP/1.1"

    @property
    def bundle(self) -> RomBundle:
        return self.server.bundle

    def log_message(self, fmt, *args):
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _send_json(self, code: int, obj: dict) -> None:
        body = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/health":
            self._send_json(200, {"status": "ok"})
        elif path == "/model":
            self._send_json(200, model_info(self.bundle))
        else:
            self._serve_static(path)

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path != "/predict":
            self._send_json(404, {"error": "unknown route"})
            return
        length = self.headers.get("Content-Length")
        try:
            n = int(length)
        except (TypeError, ValueError):
            self._send_json(400, {"error": "Content-Length required"})
            return
        if not 0 <= n <= _MAX_BODY:
            self._send_json(400, {"error": "request body too large"})
            return
        raw = self.rfile.read(n)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._send_json(400, {"error": "malformed JSON body"})
            return
        code, obj = predict_payload(self.bundle, body)
        self._send_json(code, obj)

    def _serve_static(self, path: str) -> None:
        ui_dir = getattr(self.server, "ui_dir", None)
        if ui_dir is None:
            self._send_json(404, {"error": "unknown route"})
            return
        rel = posixpath.normpath(path.lstrip("/")) or "index.html"
        if rel in (".", ""):
            rel = "index.html"
        target = (ui_dir / rel).resolve()
        base = ui_dir.resolve()
        if base not in target.parents and target != base:
            self._send_json(404, {"error": "unknown route"})
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send_json(404, {"error": "unknown route"})
            return
        data = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(
    bundle: RomBundle,
    host: str = "127.0.0.1",
    port: int = 8080,
    ui_dir=None,
    verbose: bool = False,
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), RomRequestHandler)
    server.bundle = bundle
    server.ui_dir = Path(ui_dir) if ui_dir else None
    server.verbose = verbose
    return server
