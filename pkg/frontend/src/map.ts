// Canvas renderer for the agent map.  Shapes and colours follow each
// simulator's encoding (see colors.ts); the messenger square hides while the
// broadcast is suspended.

import { HALO_RING, modeColor, opinionColor, satisfactionColor } from "./colors.js";
import type { CitizenSprite, FrameMessage, ModelKind } from "./protocol.js";

export function renderMap(
  ctx: CanvasRenderingContext2D,
  frame: FrameMessage,
  model: ModelKind,
  world: { width: number; height: number },
): void {
  const { width: cw, height: ch } = ctx.canvas;
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, cw, ch);
  if (!frame.agents) return;
  const sx = cw / world.width;
  const sy = ch / world.height;
  const r = Math.max(3, Math.min(sx, sy) * 0.45);

  for (const a of frame.agents) {
    const x = a.x * sx;
    const y = a.y * sy;
    if (a.kind === "messenger") {
      if (!a.broadcasting) continue;
      ctx.fillStyle = opinionColor(a.message ?? 0.5);
      ctx.fillRect(x - r, y - r, 2 * r, 2 * r);
      ctx.strokeStyle = "#ffffff";
      ctx.strokeRect(x - r, y - r, 2 * r, 2 * r);
      continue;
    }
    if (model === "habits") {
      ctx.fillStyle = satisfactionColor(a.satisfaction ?? 0);
      // car: square-ish body; bike: thin circle
      if (a.mode === "car") {
        ctx.fillRect(x - r, y - r * 0.7, 2 * r, 1.4 * r);
      } else {
        drawCircle(ctx, x, y, r * 0.8);
      }
    } else if (model === "reactance") {
      ctx.fillStyle = opinionColor(a.opinion ?? 0.5);
      if (a.susceptible) {
        drawTriangle(ctx, x, y, r);
      } else {
        drawCircle(ctx, x, y, r * 0.8);
      }
    } else {
      if (a.halo) {
        ctx.strokeStyle = HALO_RING;
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.arc(x, y, r * 1.4, 0, 2 * Math.PI);
        ctx.stroke();
      }
      ctx.fillStyle = modeColor(a.mode ?? "");
      drawCircle(ctx, x, y, r * 0.8);
    }
  }
}

function drawCircle(ctx: CanvasRenderingContext2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}

function drawTriangle(ctx: CanvasRenderingContext2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.moveTo(x, y - r);
  ctx.lineTo(x - r * 0.9, y + r * 0.8);
  ctx.lineTo(x + r * 0.9, y + r * 0.8);
  ctx.closePath();
  ctx.fill();
}
