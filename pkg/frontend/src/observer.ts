// Top-down arena view for the experimenter's screen.
//
// World frame: x points away from the subject's start, y to their left.
// Screen: the fan opens upward, so world x maps to -screen-y and world y
// to -screen-x (canvas y grows downward).

import { ArenaInfo, Frame, SceneMessage } from "./protocol";

export interface Ctx2DLike {
  canvas: { width: number; height: number };
  fillStyle: string | unknown;
  strokeStyle: string | unknown;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number, ccw?: boolean): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Projection {
  toScreen(wx: number, wy: number): [number, number];
  scale: number;
}

export function makeProjection(arena: ArenaInfo, width: number, height: number): Projection {
  const margin = 30;
  const scale = Math.min((height - 2 * margin) / arena.radius, (width - 2 * margin) / (2 * arena.radius));
  const originX = width / 2;
  const originY = height - margin;
  return {
    scale,
    toScreen(wx: number, wy: number): [number, number] {
      return [originX - wy * scale, originY - wx * scale];
    },
  };
}

export function wristWorldPosition(frame: Frame): [number, number, number] {
  const h = (frame.avatar.heading * Math.PI) / 180;
  const [ox, oy, oz] = frame.wrist.offset;
  return [
    frame.avatar.x + ox * Math.cos(h) - oy * Math.sin(h),
    frame.avatar.y + ox * Math.sin(h) + oy * Math.cos(h),
    oz,
  ];
}

// Beep cadence back to normalized alignment error for the HUD readout.
export function alignmentErrorFromCue(beepPeriodMs: number | null): number | null {
  if (beepPeriodMs === null) return null;
  return (beepPeriodMs - 80) / 920;
}

function fmtClock(value: number | null): string {
  return value === null ? "-" : `${value.toFixed(2)}s`;
}

export function renderObserver(ctx: Ctx2DLike, scene: SceneMessage, frame: Frame): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  const proj = makeProjection(scene.arena, width, height);
  const [cx, cy] = proj.toScreen(0, 0);
  const spanRad = (scene.arena.span * Math.PI) / 180;

  // Fan sector with its segment spokes.
  ctx.strokeStyle = "#3c4a5a";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  // Canvas angles: screen angle of world bearing b is (-90deg - b).
  const a0 = -Math.PI / 2 - spanRad / 2;
  const a1 = -Math.PI / 2 + spanRad / 2;
  ctx.arc(cx, cy, scene.arena.radius * proj.scale, a0, a1);
  ctx.lineTo(cx, cy);
  ctx.stroke();
  for (let i = 0; i <= scene.arena.segment_count; i++) {
    const bearing = -spanRad / 2 + (i * spanRad) / scene.arena.segment_count;
    const [ex, ey] = proj.toScreen(
      scene.arena.radius * Math.cos(bearing),
      scene.arena.radius * Math.sin(bearing),
    );
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(ex, ey);
    ctx.stroke();
  }

  // Scene objects: table footprint, bottle, beacon.
  for (const obj of scene.objects) {
    const [sx, sy] = proj.toScreen(obj.position[0], obj.position[1]);
    if (obj.kind === "table") {
      ctx.strokeStyle = "#8a6d3b";
      ctx.beginPath();
      ctx.arc(sx, sy, 0.25 * proj.scale, 0, 2 * Math.PI);
      ctx.stroke();
    } else if (obj.kind === "bottle") {
      ctx.fillStyle = "#4cc9f0";
      ctx.beginPath();
      ctx.arc(sx, sy, 5, 0, 2 * Math.PI);
      ctx.fill();
    } else {
      ctx.fillStyle = "#f4a261";
      ctx.beginPath();
      ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  // Avatar with heading tick and the wrist aim ray.
  const [ax, ay] = proj.toScreen(frame.avatar.x, frame.avatar.y);
  ctx.fillStyle = "#e9ecef";
  ctx.beginPath();
  ctx.arc(ax, ay, 6, 0, 2 * Math.PI);
  ctx.fill();
  const hRad = (frame.avatar.heading * Math.PI) / 180;
  const [hx, hy] = proj.toScreen(
    frame.avatar.x + 0.35 * Math.cos(hRad),
    frame.avatar.y + 0.35 * Math.sin(hRad),
  );
  ctx.strokeStyle = "#e9ecef";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(hx, hy);
  ctx.stroke();

  const [wx, wy] = wristWorldPosition(frame);
  const aimRad = ((frame.avatar.heading + frame.wrist.aim_azimuth) * Math.PI) / 180;
  const [wsx, wsy] = proj.toScreen(wx, wy);
  const [rx, ry] = proj.toScreen(wx + 0.5 * Math.cos(aimRad), wy + 0.5 * Math.sin(aimRad));
  ctx.strokeStyle = "#80ed99";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(wsx, wsy);
  ctx.lineTo(rx, ry);
  ctx.stroke();

  // HUD: phase, clocks, alignment readout, outcome banner.
  ctx.fillStyle = "#e9ecef";
  ctx.font = "14px monospace";
  ctx.fillText(`phase: ${frame.phase}`, 12, 20);
  ctx.fillText(
    `t1 ${fmtClock(frame.clocks.t1_s)}  t2 ${fmtClock(frame.clocks.t2_s)}`,
    12,
    38,
  );
  if (frame.phase === "aligning" || frame.phase === "graspable") {
    const err = alignmentErrorFromCue(frame.audio_cue?.beep_period_ms ?? null);
    if (err !== null) {
      ctx.fillText(`alignment error: ${err.toFixed(2)}`, 12, 56);
    }
  }
  if (frame.done !== null) {
    ctx.fillStyle = frame.done.success ? "#80ed99" : "#e63946";
    ctx.font = "20px monospace";
    ctx.fillText(
      frame.done.success ? "GRASP SUCCESSFUL" : `GRASP FAILED: ${frame.done.fail_reason}`,
      12,
      height - 16,
    );
  }
}
