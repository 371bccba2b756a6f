"""Wire-protocol server for the control-loop companion UI.

Speaks JSON-shaped text messages two ways on one port:

* ``POST /api`` with one client message in the body; the response body is
  a JSON array of server messages (request/response fallback).
* ``GET /ws`` upgraded to a WebSocket; every client text frame carries one
  message and every server message arrives as its own text frame.

Client -> server: ``{"type":"start","design":...,"seed":...}`` and
``{"type":"intent","session":...,"value":"short"|"long"}``.
Server -> client: ``{"type":"state",...}`` after a start, and
``{"type":"outcome",...}`` followed by the refreshed state after an
intent. Malformed input gets ``{"type":"error","error":...}``.

Static files (the built frontend) are served from an optional web root.
"""

import base64
import hashlib
import json
import mimetypes
import struct
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import sim
from .dataio import EegTrialSet, load_trialset

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class SessionManager:
    """Creates and owns sessions for one served dataset."""

    def __init__(self, trialset: EegTrialSet, settings: sim.SimSettings | None = None,
                 decoder: str = "pipeline"):
        self.trialset = trialset
        self.settings = settings if settings is not None else sim.SimSettings()
        self.decoder = decoder
        self._sessions = {}
        self._lock = threading.Lock()
        self._counter = 0

    @classmethod
    def from_path(cls, path, **kwargs):
        return cls(load_trialset(path), **kwargs)

    def _normalize_design(self, design):
        if design in ("design1", "design2"):
            return design
        if design in (1, 2, "1", "2"):
            return f"design{design}"
        raise ValueError(f"unknown design: {design!r}")

    def start(self, design, seed) -> sim.Session:
        design = self._normalize_design(design)
        with self._lock:
            self._counter += 1
            sid = f"sess-{self._counter}"
        session = sim.start_session(
            self.trialset, design, split=self.settings.split, seed=int(seed),
            settings=self.settings, decoder=self.decoder, session_id=sid,
        )
        with self._lock:
            self._sessions[sid] = session
        return session

    def get(self, session_id) -> sim.Session:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(f"unknown session id: {session_id!r}")
            return self._sessions[session_id]

    def handle_message(self, message: dict) -> list:
        """Process one client message, returning the list of reply messages."""
        try:
            if not isinstance(message, dict):
                raise ValueError("message must be an object")
            kind = message.get("type")
            if kind == "start":
                session = self.start(message.get("design", "design1"),
                                     message.get("seed", 0))
                return [session.state_message()]
            if kind == "intent":
                session = self.get(message.get("session"))
                outcome = session.submit_intent(message.get("value"))
                return [outcome, session.state_message()]
            raise ValueError(f"unknown message type: {kind!r}")
        except (ValueError, KeyError) as exc:
            return [{"type": "error", "error": str(exc)}]


def encode_message(msg: dict) -> str:
    # Newline-free so one message always fits one line / one frame.
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    manager: SessionManager = None
    web_root: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # -- plain HTTP -------------------------------------------------------

    def _send_json(self, payload, status=200):
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path != "/api":
            self._send_json([{"type": "error", "error": "unknown endpoint"}], 404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            message = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            self._send_json([{"type": "error", "error": "malformed message"}], 400)
            return
        self._send_json(self.manager.handle_message(message))

    def do_GET(self):
        if self.path == "/ws":
            if self.headers.get("Upgrade", "").lower() == "websocket":
                self._serve_websocket()
            else:
                self._send_json([{"type": "error", "error": "expected upgrade"}], 400)
            return
        self._serve_static()

    def _serve_static(self):
        root = self.web_root
        if root is None:
            self._send_json([{"type": "error", "error": "no static content"}], 404)
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._send_json([{"type": "error", "error": "not found"}], 404)
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- websocket --------------------------------------------------------

    def _serve_websocket(self):
        key = self.headers.get("Sec-WebSocket-Key", "")
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
        ).decode("ascii")
        self.send_response(101, "Switching Protocols")
        self.send_header("Upgrade", "websocket")
        self.send_header("Connection", "Upgrade")
        self.send_header("Sec-WebSocket-Accept", accept)
        self.end_headers()
        self.close_connection = True
        try:
            while True:
                frame = self._read_frame()
                if frame is None:
                    break
                opcode, payload = frame
                if opcode == 0x8:  # close
                    self._write_frame(0x8, payload[:2])
                    break
                if opcode == 0x9:  # ping
                    self._write_frame(0xA, payload)
                    continue
                if opcode != 0x1:
                    continue
                try:
                    message = json.loads(payload.decode("utf-8"))
                    replies = self.manager.handle_message(message)
                except (ValueError, UnicodeDecodeError):
                    replies = [{"type": "error", "error": "malformed message"}]
                for reply in replies:
                    self._write_frame(0x1, encode_message(reply).encode("utf-8"))
        except (ConnectionError, OSError):
            pass

    def _read_exact(self, n: int) -> bytes | None:
        data = b""
        while len(data) < n:
            chunk = self.rfile.read(n - len(data))
            if not chunk:
                return None
            data += chunk
        return data

    def _read_frame(self):
        head = self._read_exact(2)
        if head is None:
            return None
        opcode = head[0] & 0x0F
        masked = head[1] & 0x80
        length = head[1] & 0x7F
        if length == 126:
            ext = self._read_exact(2)
            if ext is None:
                return None
            (length,) = struct.unpack("!H", ext)
        elif length == 127:
            ext = self._read_exact(8)
            if ext is None:
                return None
            (length,) = struct.unpack("!Q", ext)
        mask = b"\x00\x00\x00\x00"
        if masked:
            mask = self._read_exact(4)
            if mask is None:
                return None
        payload = self._read_exact(length) if length else b""
        if payload is None:
            return None
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return opcode, payload

    def _write_frame(self, opcode: int, payload: bytes):
        header = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header += bytes([n])
        elif n < 65536:
            header += bytes([126]) + struct.pack("!H", n)
        else:
            header += bytes([127]) + struct.pack("!Q", n)
        self.wfile.write(header + payload)
        self.wfile.flush()


def make_server(manager: SessionManager, host: str = "127.0.0.1", port: int = 8765,
                web_root=None) -> ThreadingHTTPServer:
    """Build (without starting) the threaded protocol server."""
    handler = type("BoundHandler", (_Handler,), {
        "manager": manager,
        "web_root": Path(web_root) if web_root is not None else None,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(manager: SessionManager, host="127.0.0.1", port=8765, web_root=None):
    httpd = make_server(manager, host, port, web_root)
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
