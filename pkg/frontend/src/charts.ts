// Minimal canvas line charts: multiple series over ticks, fixed y range
// starting at 0, last value shown in the legend.  Rendering is throttled by
// the caller; frames are buffered losslessly in the view-model.

import type { ChartSpec } from "./viewmodel.js";

export function renderChart(
  ctx: CanvasRenderingContext2D,
  spec: ChartSpec,
  ticks: number[],
  series: Map<string, (number | null)[]>,
): void {
  const { width: w, height: h } = ctx.canvas;
  const padL = 34;
  const padB = 16;
  const padT = 18;
  ctx.fillStyle = "#151a24";
  ctx.fillRect(0, 0, w, h);
  ctx.fillStyle = "#aab4cc";
  ctx.font = "11px system-ui, sans-serif";
  ctx.fillText(spec.title, 6, 12);

  const n = ticks.length;
  const plotW = w - padL - 6;
  const plotH = h - padT - padB;
  const xAt = (k: number) => padL + (n <= 1 ? 0 : (k / (n - 1)) * plotW);
  const yAt = (v: number) => padT + plotH * (1 - Math.min(v, spec.yMax) / spec.yMax);

  ctx.strokeStyle = "#2a3245";
  ctx.strokeRect(padL, padT, plotW, plotH);
  ctx.fillText("0", 6, padT + plotH + 4);
  ctx.fillText(String(spec.yMax), 6, padT + 8);
  if (n > 0) ctx.fillText(`t=${ticks[n - 1]}`, w - 54, padT + plotH + 13);

  let legendX = 80;
  for (const s of spec.series) {
    const values = series.get(s.metric) ?? [];
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ? [4, 3] : []);
    ctx.lineWidth = 1.4;
    ctx.beginPath();
    let started = false;
    for (let k = 0; k < n; k++) {
      const v = values[k];
      if (v === null || v === undefined) {
        started = false;
        continue;
      }
      const x = xAt(k);
      const y = yAt(v);
      if (!started) {
        ctx.moveTo(x, y);
        started = true;
      } else {
        ctx.lineTo(x, y);
      }
    }
    ctx.stroke();
    ctx.setLineDash([]);
    const last = values.length ? values[values.length - 1] : null;
    ctx.fillStyle = s.color;
    ctx.fillText(last === null ? "-" : formatValue(last), legendX, 12);
    legendX += 44;
    ctx.fillStyle = "#aab4cc";
  }
}

export function formatValue(v: number): string {
  if (Number.isInteger(v)) return String(v);
  return Math.abs(v) < 10 ? v.toFixed(2) : v.toFixed(1);
}
