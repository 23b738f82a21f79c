// Fixed-capacity series for the per-criterion quality sparklines.

export interface Series {
  values: number[];
  capacity: number;
}

export function makeSeries(capacity = 120): Series {
  return { values: [], capacity };
}

export function pushValue(s: Series, v: number): void {
  s.values.push(v);
  if (s.values.length > s.capacity) s.values.shift();
}

export function drawSparkline(
  ctx: CanvasRenderingContext2D,
  s: Series,
  x: number,
  y: number,
  w: number,
  h: number,
  color: string,
): void {
  if (s.values.length < 2) return;
  let lo = Infinity, hi = -Infinity;
  for (const v of s.values) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  const span = hi - lo || 1;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1;
  ctx.beginPath();
  s.values.forEach((v, i) => {
    const px = x + (i / (s.capacity - 1)) * w;
    const py = y + h - ((v - lo) / span) * h;
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}
