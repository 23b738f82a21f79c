// Reconnecting frame transport over a WebSocket-like socket. The socket
// factory is injectable so tests can drive the client against a mock server
// without any network.

import { ClientMessage, ServerFrame, decodeFrame, encodeMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export interface TransportEvents {
  onFrame: (frame: ServerFrame) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
  onProtocolError?: (err: unknown, raw: string) => void;
}

export interface Transport {
  send(msg: ClientMessage): void;
  close(): void;
  readonly connected: boolean;
}

const BACKOFF_START_MS = 250;
const BACKOFF_MAX_MS = 5000;

export function connectTransport(
  url: string,
  events: TransportEvents,
  socketFactory: (url: string) => SocketLike = (u) => new WebSocket(u) as unknown as SocketLike,
  scheduler: (fn: () => void, ms: number) => void = (fn, ms) => void setTimeout(fn, ms),
): Transport {
  let socket: SocketLike | null = null;
  let open = false;
  let closedByUser = false;
  let backoff = BACKOFF_START_MS;
  const pending: string[] = [];

  function dial(): void {
    events.onStatus?.("connecting");
    socket = socketFactory(url);
    socket.onopen = () => {
      open = true;
      backoff = BACKOFF_START_MS;
      events.onStatus?.("open");
      while (pending.length > 0 && socket) {
        socket.send(pending.shift()!);
      }
    };
    socket.onmessage = (ev) => {
      // a malformed frame is logged and skipped; the session survives
      try {
        events.onFrame(decodeFrame(ev.data));
      } catch (err) {
        events.onProtocolError?.(err, ev.data);
      }
    };
    const reconnect = () => {
      if (!open && socket === null) return; // already handled
      open = false;
      socket = null;
      events.onStatus?.("closed");
      if (!closedByUser) {
        scheduler(dial, backoff);
        backoff = Math.min(backoff * 2, BACKOFF_MAX_MS);
      }
    };
    socket.onclose = reconnect;
    socket.onerror = reconnect;
  }

  dial();

  return {
    send(msg: ClientMessage): void {
      const text = encodeMessage(msg);
      if (open && socket) {
        socket.send(text);
      } else {
        pending.push(text); // queued until the next (re)connect
      }
    },
    close(): void {
      closedByUser = true;
      socket?.close();
      socket = null;
      open = false;
    },
    get connected(): boolean {
      return open;
    },
  };
}
