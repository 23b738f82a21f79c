// Wires transport, renderer, weight panel, drag handling and quality
// readouts into one live session against the steering service.

import { dragMove, dragPress, dragRelease, makeDragState } from "./drag.js";
import { Criterion, ServerFrame } from "./protocol.js";
import { acceptPositions, drawScene, interpolate, makeRenderState } from "./renderer.js";
import { applyAck, createWeightPanel, WeightPanel } from "./sliders.js";
import { drawSparkline, makeSeries, pushValue, Series } from "./sparkline.js";
import { connectTransport, Transport } from "./transport.js";
import { hitTestNode, makeViewport, panBy, toWorld, zoomAt } from "./viewport.js";

export interface App {
  transport: Transport;
  stop(): void;
}

export function startApp(serviceUrl: string, container: HTMLElement): App {
  const canvas = document.createElement("canvas");
  canvas.width = 900;
  canvas.height = 640;
  canvas.className = "layout-canvas";
  const side = document.createElement("div");
  side.className = "side-panel";
  const qualityCanvas = document.createElement("canvas");
  qualityCanvas.width = 260;
  qualityCanvas.height = 300;
  const toast = document.createElement("div");
  toast.className = "toast";
  container.append(canvas, side);

  const ctx = canvas.getContext("2d")!;
  const qctx = qualityCanvas.getContext("2d")!;
  const rs = makeRenderState();
  const vp = makeViewport();
  const drag = makeDragState();
  const qualitySeries = new Map<string, Series>();
  let panel: WeightPanel | null = null;
  let paused = false;
  let running = true;

  const transport = connectTransport(serviceUrl, {
    onFrame: (frame: ServerFrame) => {
      switch (frame.type) {
        case "hello": {
          rs.edges = frame.edges;
          rs.banner = null;
          panel = createWeightPanel(
            frame.criteria as Criterion[],
            frame.weights,
            (msg) => transport.send(msg),
          );
          side.replaceChildren(panel.root, qualityCanvas, toast);
          break;
        }
        case "state": {
          acceptPositions(rs, frame.positions);
          if (frame.qualities) {
            for (const [k, v] of Object.entries(frame.qualities)) {
              if (!qualitySeries.has(k)) qualitySeries.set(k, makeSeries());
              pushValue(qualitySeries.get(k)!, v);
            }
          }
          rs.banner = paused ? "paused" : null;
          break;
        }
        case "ack": {
          if (!frame.ok && panel) {
            const toRevert = applyAck(panel.model, frame.id, false);
            if (toRevert) {
              panel.revert(toRevert);
              showToast(`rejected: ${frame.error ?? "error"}`);
            }
          } else if (panel) {
            applyAck(panel.model, frame.id, true);
          }
          break;
        }
        case "heartbeat":
          paused = frame.paused;
          rs.banner = paused ? "paused" : null;
          break;
        case "done":
          rs.banner = `finished at iteration ${frame.iteration}`;
          break;
        case "error":
          rs.banner = `service error: ${frame.message}`;
          break;
      }
    },
    onStatus: (status) => {
      if (status !== "open") rs.banner = `${status}… reconnecting`;
    },
    onProtocolError: (err) => {
      console.warn("skipping malformed frame:", err);
    },
  });

  function showToast(text: string): void {
    toast.textContent = text;
    toast.classList.add("visible");
    setTimeout(() => toast.classList.remove("visible"), 2500);
  }

  // ---- pointer interaction ----
  let panning = false;
  let last: [number, number] = [0, 0];

  canvas.addEventListener("pointerdown", (ev) => {
    const node = hitTestNode(vp, rs.current, ev.offsetX, ev.offsetY, canvas.width, canvas.height);
    if (node >= 0) {
      const [wx, wy] = toWorld(vp, ev.offsetX, ev.offsetY, canvas.width, canvas.height);
      for (const msg of dragPress(drag, node, wx, wy)) transport.send(msg);
      rs.draggingNode = node;
      canvas.setPointerCapture(ev.pointerId);
    } else {
      panning = true;
      last = [ev.offsetX, ev.offsetY];
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (drag.node !== null) {
      const [wx, wy] = toWorld(vp, ev.offsetX, ev.offsetY, canvas.width, canvas.height);
      for (const msg of dragMove(drag, wx, wy)) transport.send(msg);
    } else if (panning) {
      panBy(vp, ev.offsetX - last[0], ev.offsetY - last[1]);
      last = [ev.offsetX, ev.offsetY];
    }
  });
  const release = () => {
    for (const msg of dragRelease(drag)) transport.send(msg);
    rs.draggingNode = null;
    panning = false;
  };
  canvas.addEventListener("pointerup", release);
  canvas.addEventListener("pointercancel", release);
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    zoomAt(vp, ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.15 : 1 / 1.15, canvas.width, canvas.height);
  });

  // ---- render loop ----
  function tick(): void {
    if (!running) return;
    interpolate(rs);
    drawScene(ctx, rs, vp, canvas.width, canvas.height);
    qctx.clearRect(0, 0, qualityCanvas.width, qualityCanvas.height);
    let row = 0;
    for (const [name, series] of qualitySeries) {
      qctx.fillStyle = "#333";
      qctx.font = "11px system-ui, sans-serif";
      qctx.fillText(name, 4, 20 + row * 32);
      drawSparkline(qctx, series, 40, 6 + row * 32, 210, 24, "#1f3b73");
      row++;
    }
    requestAnimationFrame(tick);
  }
  requestAnimationFrame(tick);

  return {
    transport,
    stop(): void {
      running = false;
      transport.close();
    },
  };
}
