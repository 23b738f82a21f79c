// World <-> screen mapping with auto-fit, manual zoom and pan.

export interface Viewport {
  scale: number;
  cx: number; // world coords at the canvas centre
  cy: number;
  manual: boolean; // user has zoomed/panned; stop auto-fitting
}

export function makeViewport(): Viewport {
  return { scale: 50, cx: 0, cy: 0, manual: false };
}

export function autoFit(
  vp: Viewport,
  positions: [number, number][],
  width: number,
  height: number,
  margin = 0.1,
): void {
  if (vp.manual || positions.length === 0) return;
  let xlo = Infinity, xhi = -Infinity, ylo = Infinity, yhi = -Infinity;
  for (const [x, y] of positions) {
    xlo = Math.min(xlo, x); xhi = Math.max(xhi, x);
    ylo = Math.min(ylo, y); yhi = Math.max(yhi, y);
  }
  const spanX = Math.max(xhi - xlo, 1e-9);
  const spanY = Math.max(yhi - ylo, 1e-9);
  const fit = Math.min(width / spanX, height / spanY) * (1 - margin);
  // smooth toward the fit so the view does not jitter frame to frame
  vp.scale = vp.scale * 0.85 + fit * 0.15;
  vp.cx = vp.cx * 0.85 + (xlo + xhi) / 2 * 0.15;
  vp.cy = vp.cy * 0.85 + (ylo + yhi) / 2 * 0.15;
}

export function toScreen(vp: Viewport, x: number, y: number, w: number, h: number): [number, number] {
  return [w / 2 + (x - vp.cx) * vp.scale, h / 2 - (y - vp.cy) * vp.scale];
}

export function toWorld(vp: Viewport, sx: number, sy: number, w: number, h: number): [number, number] {
  return [vp.cx + (sx - w / 2) / vp.scale, vp.cy - (sy - h / 2) / vp.scale];
}

export function zoomAt(vp: Viewport, sx: number, sy: number, factor: number, w: number, h: number): void {
  const [wx, wy] = toWorld(vp, sx, sy, w, h);
  vp.scale *= factor;
  // keep the point under the cursor fixed
  vp.cx = wx - (sx - w / 2) / vp.scale;
  vp.cy = wy + (sy - h / 2) / vp.scale;
  vp.manual = true;
}

export function panBy(vp: Viewport, dxPixels: number, dyPixels: number): void {
  vp.cx -= dxPixels / vp.scale;
  vp.cy += dyPixels / vp.scale;
  vp.manual = true;
}

/** Index of the node within `radiusPx` of the pointer, nearest first; -1 if none. */
export function hitTestNode(
  vp: Viewport,
  positions: [number, number][],
  sx: number,
  sy: number,
  w: number,
  h: number,
  radiusPx = 12,
): number {
  let best = -1;
  let bestD = radiusPx * radiusPx;
  for (let i = 0; i < positions.length; i++) {
    const [px, py] = toScreen(vp, positions[i][0], positions[i][1], w, h);
    const d = (px - sx) * (px - sx) + (py - sy) * (py - sy);
    if (d <= bestD) {
      best = i;
      bestD = d;
    }
  }
  return best;
}
