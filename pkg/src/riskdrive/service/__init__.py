"""Realtime session service: fixed-tick loop, live scoring, JSON protocol."""

from .protocol import ACTIONS, PROTOCOL_VERSION, ProtocolError, parse_frame
from .session import (
    HUMAN_ID,
    SessionConfig,
    SessionManager,
    SessionState,
    create_session,
    session_tick,
)
