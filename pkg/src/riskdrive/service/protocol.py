"""JSON frame schemas for the realtime session protocol (v1).

Client to server::

    {"v":1,"type":"start","config":{...}}
    {"v":1,"type":"control","session":id,"action":"accelerate"|"brake"|
        "lane_left"|"lane_right","seq":n}
    {"v":1,"type":"stop","session":id}

Server to client: ``started``, per-tick ``state``, ``stopped`` and ``error``
frames, every one carrying ``"v": 1``.
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1
ACTIONS = ("accelerate", "brake", "lane_left", "lane_right")


class ProtocolError(ValueError):
    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code


def parse_frame(text: str) -> dict:
    try:
        frame = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_json", str(exc)) from None
    if not isinstance(frame, dict):
        raise ProtocolError("bad_frame", "frame must be an object")
    kind = frame.get("type")
    if kind == "start":
        if not isinstance(frame.get("config", {}), dict):
            raise ProtocolError("bad_config", "config must be an object")
    elif kind == "control":
        if frame.get("action") not in ACTIONS:
            raise ProtocolError("bad_action", f"action must be one of {ACTIONS}")
        if not isinstance(frame.get("seq"), int):
            raise ProtocolError("bad_seq", "control frames need an integer seq")
        if "session" not in frame:
            raise ProtocolError("missing_session")
    elif kind == "stop":
        if "session" not in frame:
            raise ProtocolError("missing_session")
    else:
        raise ProtocolError("unknown_type", f"unknown frame type {kind!r}")
    return frame


def error_frame(code: str, message: str = "") -> dict:
    return {"v": PROTOCOL_VERSION, "type": "error", "code": code, "message": message}


def started_frame(session_id: str, config: dict) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "started",
        "session": session_id,
        "config": config,
    }


def stopped_frame(session_id: str, exports: dict) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "stopped",
        "session": session_id,
        "exports": exports,
    }
