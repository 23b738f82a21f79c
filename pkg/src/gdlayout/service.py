"""Live-steerable layout service.

One WebSocket connection = one session = one optimizer loop. JSON text
frames both ways. Inbound messages (all optionally carry an "id" echoed in
the ack):

    {"type": "set_weight", "criterion": "ST", "value": 1.0}
    {"type": "pin_node", "node": 3, "x": 1.0, "y": -2.0}
    {"type": "unpin_node", "node": 3}
    {"type": "pause"} | {"type": "resume"}
    {"type": "reset", "seed": 7}
    {"type": "set_lr", "value": 0.05}

Outbound frames:

    {"type": "hello", "version": 1, "graph", "n", "edges", "criteria",
     "weights", "every"}
    {"type": "ack", "id", "ok", "iteration"}            applied messages
    {"type": "ack", "id", "ok": false, "error"}         rejected messages
    {"type": "state", "version": 1, "iteration", "positions",
     "ema", "qualities"}                                 every k iterations
    {"type": "heartbeat", "iteration", "paused"}         while paused
    {"type": "done", "iteration"}                        loop finished
    {"type": "error", "message"}                         loop crashed

Messages apply atomically between optimizer iterations; the ack's iteration
is the first iteration that saw the change. Slow consumers lose the oldest
frames first (bounded send queue); the optimizer never blocks on a socket.
"""

from __future__ import annotations

import json
import math
import queue
import threading
import time
from collections import deque

from .config import RunConfig
from .graphs import Graph
from .optimizer import LoopControl, LoopState, init_layout, run_layout
from .quality import evaluate_all

PROTOCOL_VERSION = 1
OUTBOX_LIMIT = 512


class SteeringControl(LoopControl):
    """Bridges a message queue and a frame queue into the optimizer loop."""

    def __init__(self, g: Graph, kinds, every_k: int = 1, qualities_every: int = 50):
        self.g = g
        self.kinds = tuple(kinds)
        self.every_k = max(1, every_k)
        self.qualities_every = max(1, qualities_every)
        self.inbox: queue.Queue = queue.Queue()
        # acks/hello/done are never dropped; state/heartbeat frames are
        # droppable oldest-first so a slow client cannot stall the loop
        self.control_frames = deque()
        self.state_frames = deque(maxlen=OUTBOX_LIMIT)
        self.wakeup = threading.Condition()
        self.closed = False
        self._frames_emitted = 0
        self._last_heartbeat = 0.0
        self._dist = None

    # ---- outbound ------------------------------------------------------

    def _send(self, frame: dict, droppable: bool = False) -> None:
        with self.wakeup:
            if droppable:
                self.state_frames.append(json.dumps(frame))
            else:
                self.control_frames.append(json.dumps(frame))
            self.wakeup.notify_all()

    def next_outgoing(self, timeout: float = 0.25):
        with self.wakeup:
            if not (self.control_frames or self.state_frames) and not self.closed:
                self.wakeup.wait(timeout)
            if self.control_frames:
                return self.control_frames.popleft()
            if self.state_frames:
                return self.state_frames.popleft()
            return None

    def close(self) -> None:
        with self.wakeup:
            self.closed = True
            self.wakeup.notify_all()

    # ---- loop hooks ------------------------------------------------------

    def poll(self, state: LoopState) -> None:
        if self.closed:
            state.stop = True
            return
        while True:
            try:
                msg = self.inbox.get_nowait()
            except queue.Empty:
                break
            self._apply(state, msg)

    def _ack(self, msg, state, ok=True, error=None):
        frame = {"type": "ack", "id": msg.get("id"), "ok": ok}
        if ok:
            frame["iteration"] = state.iteration + 1
        else:
            frame["error"] = error
        self._send(frame)

    def _apply(self, state: LoopState, msg: dict) -> None:
        kind = msg.get("type")
        try:
            if kind == "set_weight":
                crit = msg["criterion"]
                value = float(msg["value"])
                if crit not in self.kinds:
                    return self._ack(msg, state, False, f"unknown criterion {crit!r}")
                if value < 0 or not math.isfinite(value):
                    return self._ack(msg, state, False, "weight must be finite and >= 0")
                state.weight_overrides[crit] = value
            elif kind == "pin_node":
                node = int(msg["node"])
                x, y = float(msg["x"]), float(msg["y"])
                if not (0 <= node < self.g.n):
                    return self._ack(msg, state, False, f"unknown node id {node}")
                if not (math.isfinite(x) and math.isfinite(y)):
                    return self._ack(msg, state, False, "pin coordinates must be finite")
                state.pinned[node] = (x, y)
            elif kind == "unpin_node":
                node = int(msg["node"])
                if not (0 <= node < self.g.n):
                    return self._ack(msg, state, False, f"unknown node id {node}")
                state.pinned.pop(node, None)
            elif kind == "pause":
                state.paused = True
            elif kind == "resume":
                state.paused = False
            elif kind == "reset":
                state.reset_seed = int(msg.get("seed", 0))
            elif kind == "set_lr":
                value = float(msg["value"])
                if value <= 0 or not math.isfinite(value):
                    return self._ack(msg, state, False, "learning rate must be positive")
                state.lr_override = value
            else:
                return self._ack(msg, state, False, f"unknown message type {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            return self._ack(msg, state, False, f"malformed {kind} message: {exc}")
        self._ack(msg, state, True)

    def after_step(self, state: LoopState) -> None:
        if state.iteration % self.every_k:
            return
        self._frames_emitted += 1
        qualities = None
        if self._frames_emitted % self.qualities_every == 1 or self.qualities_every == 1:
            try:
                if self._dist is None:
                    from .graphs import DistanceMatrix

                    self._dist = DistanceMatrix(self.g)
                qualities = evaluate_all(self.g, state.X, dist=self._dist).as_dict()
            except ValueError:
                qualities = None
        frame = {
            "type": "state",
            "version": PROTOCOL_VERSION,
            "iteration": state.iteration,
            "positions": [[float(x), float(y)] for x, y in state.X],
            "ema": None if math.isnan(state.last_ema) else state.last_ema,
            "qualities": qualities,
        }
        self._send(frame, droppable=True)

    def idle(self, state: LoopState) -> None:
        now = time.monotonic()
        if now - self._last_heartbeat >= 0.25:
            self._last_heartbeat = now
            self._send(
                {"type": "heartbeat", "iteration": state.iteration, "paused": state.paused},
                droppable=True,
            )


def run_session(conn, cfg: RunConfig, every_k: int = 1, qualities_every: int = 50) -> None:
    """Drive one optimizer session over an open WebSocket connection."""
    g = cfg.build_graph()
    configs = cfg.build_criteria()
    opt = cfg.build_optimizer()
    kinds = [c.kind for c in configs]
    control = SteeringControl(g, kinds, every_k=every_k, qualities_every=qualities_every)

    control._send(
        {
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "graph": g.name,
            "n": g.n,
            "edges": [list(e) for e in g.edges],
            "criteria": kinds,
            "weights": {c.kind: float(c.weight_schedule(1)) for c in _as_scheduled(configs)},
            "every": control.every_k,
        }
    )

    def optimize():
        try:
            init = init_layout(g.n, cfg.seed)
            _, trace = run_layout(g, configs, opt, init, control=control)
            last = trace.iterations[-1] if trace.iterations else 0
            control._send({"type": "done", "iteration": last})
        except Exception as exc:  # surfaced to the client, not swallowed
            control._send({"type": "error", "message": str(exc)})
        finally:
            control.close()

    def write_loop():
        while True:
            frame = control.next_outgoing()
            if frame is None:
                if control.closed and not (control.control_frames or control.state_frames):
                    return
                continue
            try:
                conn.send(frame)
            except Exception:
                control.close()
                return

    worker = threading.Thread(target=optimize, daemon=True)
    writer = threading.Thread(target=write_loop, daemon=True)
    worker.start()
    writer.start()
    try:
        for raw in conn:
            try:
                msg = json.loads(raw)
                if not isinstance(msg, dict):
                    raise ValueError("frame must be a JSON object")
            except ValueError as exc:
                control._send(
                    {"type": "ack", "id": None, "ok": False, "error": f"bad JSON: {exc}"}
                )
                continue
            control.inbox.put(msg)
    except Exception:
        pass
    finally:
        control.close()
        worker.join(timeout=5)
        writer.join(timeout=5)


def _as_scheduled(configs):
    from .schedules import as_schedule

    for c in configs:
        c.weight_schedule = as_schedule(c.weight_schedule)
    return configs


def serve(cfg: RunConfig, host: str = "127.0.0.1", port: int = 8765, every_k: int = 1):
    """Blocking server; one session per connection."""
    from websockets.sync.server import serve as ws_serve

    def handler(conn):
        run_session(conn, cfg, every_k=every_k)

    with ws_serve(handler, host, port) as server:
        server.serve_forever()
