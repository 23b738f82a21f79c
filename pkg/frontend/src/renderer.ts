// Immediate-mode canvas renderer with between-frame position interpolation.

import { Viewport, autoFit, toScreen } from "./viewport.js";

export interface RenderState {
  edges: [number, number][];
  current: [number, number][]; // interpolated positions being drawn
  target: [number, number][]; // latest service frame
  draggingNode: number | null;
  banner: string | null;
}

export function makeRenderState(): RenderState {
  return { edges: [], current: [], target: [], draggingNode: null, banner: null };
}

export function acceptPositions(rs: RenderState, positions: [number, number][]): void {
  rs.target = positions;
  if (rs.current.length !== positions.length) {
    rs.current = positions.map((p) => [p[0], p[1]]);
  }
}

/** Move the drawn positions a step toward the latest frame (smooth motion
 * even when service frames arrive slower than the display rate). */
export function interpolate(rs: RenderState, alpha = 0.35): void {
  for (let i = 0; i < rs.current.length && i < rs.target.length; i++) {
    rs.current[i][0] += (rs.target[i][0] - rs.current[i][0]) * alpha;
    rs.current[i][1] += (rs.target[i][1] - rs.current[i][1]) * alpha;
  }
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  rs: RenderState,
  vp: Viewport,
  width: number,
  height: number,
): void {
  autoFit(vp, rs.current, width, height);
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#1f3b73";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  for (const [i, j] of rs.edges) {
    if (i >= rs.current.length || j >= rs.current.length) continue;
    const [x1, y1] = toScreen(vp, rs.current[i][0], rs.current[i][1], width, height);
    const [x2, y2] = toScreen(vp, rs.current[j][0], rs.current[j][1], width, height);
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
  }
  ctx.stroke();

  for (let i = 0; i < rs.current.length; i++) {
    const [x, y] = toScreen(vp, rs.current[i][0], rs.current[i][1], width, height);
    ctx.beginPath();
    ctx.arc(x, y, i === rs.draggingNode ? 7 : 4.5, 0, 2 * Math.PI);
    ctx.fillStyle = i === rs.draggingNode ? "#e8b023" : "#d1495b";
    ctx.fill();
  }

  if (rs.banner) {
    ctx.fillStyle = "rgba(30, 30, 30, 0.8)";
    ctx.fillRect(0, 0, width, 28);
    ctx.fillStyle = "#fff";
    ctx.font = "13px system-ui, sans-serif";
    ctx.fillText(rs.banner, 10, 18);
  }
}
