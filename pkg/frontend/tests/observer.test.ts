import { describe, expect, it } from "vitest";

import {
  Ctx2DLike,
  alignmentErrorFromCue,
  makeProjection,
  renderObserver,
  wristWorldPosition,
} from "../src/observer";
import { ArenaInfo, Frame, SceneMessage } from "../src/protocol";

const ARENA: ArenaInfo = {
  radius: 3.0,
  span: 120,
  segment_count: 10,
  tick: 0.02,
  table_height: 0.75,
  grasp_height: 0.85,
  v_max: 1.2,
  omega_max: 120,
  reach_min: 0.2,
  reach_max: 0.6,
};

function testFrame(overrides: Partial<Frame> = {}): Frame {
  return {
    type: "frame",
    schema_version: 1,
    tick: 42,
    phase: "navigating",
    avatar: { x: 0.5, y: 0.0, heading: 0.0 },
    wrist: { offset: [0.3, -0.2, 0.9], aim_azimuth: 0, aim_elevation: -10, rotation: 0 },
    prosthesis: { aperture: 1, wrist_rotation: 0, gesture: "open", holding: false },
    audio_cue: { left_gain: 0.5, right_gain: 0.5, itd_us: 0, beep_period_ms: null, source: "beacon" },
    prompt: null,
    events: [],
    clocks: { t1_s: null, t2_s: null },
    done: null,
    input: {},
    ...overrides,
  };
}

function testScene(): SceneMessage {
  return {
    type: "scene",
    schema_version: 1,
    arena: ARENA,
    objects: [
      { kind: "table", position: [2.0, 0.5, 0.75], principal_axis: [0, 0, 1] },
      { kind: "bottle", position: [2.0, 0.5, 0.85], principal_axis: [0, 0, 1] },
      { kind: "beacon", position: [2.0, 0.5, 1.0], principal_axis: [0, 0, 1] },
    ],
    mode: "human_driven",
    trial_index: 0,
  };
}

class RecordingCtx implements Ctx2DLike {
  canvas = { width: 820, height: 560 };
  fillStyle: string | unknown = "";
  strokeStyle: string | unknown = "";
  lineWidth = 1;
  font = "";
  calls: string[] = [];
  texts: string[] = [];

  clearRect(): void {
    this.calls.push("clearRect");
  }
  beginPath(): void {
    this.calls.push("beginPath");
  }
  moveTo(): void {
    this.calls.push("moveTo");
  }
  lineTo(): void {
    this.calls.push("lineTo");
  }
  arc(): void {
    this.calls.push("arc");
  }
  stroke(): void {
    this.calls.push("stroke");
  }
  fill(): void {
    this.calls.push("fill");
  }
  fillRect(): void {
    this.calls.push("fillRect");
  }
  fillText(text: string): void {
    this.calls.push("fillText");
    this.texts.push(text);
  }
}

describe("makeProjection", () => {
  it("puts the world origin at the bottom center", () => {
    const proj = makeProjection(ARENA, 820, 560);
    const [x, y] = proj.toScreen(0, 0);
    expect(x).toBeCloseTo(410);
    expect(y).toBeCloseTo(530);
  });

  it("maps world +x to screen-up and +y to screen-left", () => {
    const proj = makeProjection(ARENA, 820, 560);
    const [ox, oy] = proj.toScreen(0, 0);
    const [fx, fy] = proj.toScreen(1, 0);
    expect(fy).toBeLessThan(oy);
    expect(fx).toBeCloseTo(ox);
    const [lx, ly] = proj.toScreen(0, 1);
    expect(lx).toBeLessThan(ox);
    expect(ly).toBeCloseTo(oy);
  });

  it("keeps the whole fan inside the canvas", () => {
    const proj = makeProjection(ARENA, 820, 560);
    for (const bearing of [-60, 0, 60]) {
      const b = (bearing * Math.PI) / 180;
      const [x, y] = proj.toScreen(ARENA.radius * Math.cos(b), ARENA.radius * Math.sin(b));
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(820);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(560);
    }
  });
});

describe("wristWorldPosition", () => {
  it("adds the raw offset when heading is zero", () => {
    const frame = testFrame();
    const [x, y, z] = wristWorldPosition(frame);
    expect(x).toBeCloseTo(0.5 + 0.3);
    expect(y).toBeCloseTo(-0.2);
    expect(z).toBeCloseTo(0.9);
  });

  it("rotates the offset with the heading", () => {
    const frame = testFrame({ avatar: { x: 0, y: 0, heading: 90 } });
    const [x, y] = wristWorldPosition(frame);
    // offset (0.3, -0.2) rotated 90 deg ccw -> (0.2, 0.3)
    expect(x).toBeCloseTo(0.2);
    expect(y).toBeCloseTo(0.3);
  });
});

describe("alignmentErrorFromCue", () => {
  it("inverts the beep cadence map", () => {
    expect(alignmentErrorFromCue(80)).toBeCloseTo(0);
    expect(alignmentErrorFromCue(1000)).toBeCloseTo(1);
    expect(alignmentErrorFromCue(540)).toBeCloseTo(0.5);
  });

  it("passes null through", () => {
    expect(alignmentErrorFromCue(null)).toBeNull();
  });
});

describe("renderObserver", () => {
  it("draws the fan, the objects, and the HUD", () => {
    const ctx = new RecordingCtx();
    renderObserver(ctx, testScene(), testFrame());
    expect(ctx.calls[0]).toBe("clearRect");
    // 3 scene objects -> at least 3 arcs beyond the fan arc.
    const arcs = ctx.calls.filter((c) => c === "arc").length;
    expect(arcs).toBeGreaterThanOrEqual(4);
    expect(ctx.texts.some((t) => t.startsWith("phase: navigating"))).toBe(true);
  });

  it("shows the alignment readout while aligning", () => {
    const ctx = new RecordingCtx();
    const frame = testFrame({
      phase: "aligning",
      audio_cue: { left_gain: 0.6, right_gain: 0.4, itd_us: 100, beep_period_ms: 540, source: "proximity" },
    });
    renderObserver(ctx, testScene(), frame);
    expect(ctx.texts.some((t) => t.includes("alignment error: 0.50"))).toBe(true);
  });

  it("shows the outcome banner when done", () => {
    const ctx = new RecordingCtx();
    const ok = testFrame({ phase: "done", done: { success: true, fail_reason: null } });
    renderObserver(ctx, testScene(), ok);
    expect(ctx.texts).toContain("GRASP SUCCESSFUL");

    const ctx2 = new RecordingCtx();
    const bad = testFrame({ phase: "done", done: { success: false, fail_reason: "timeout" } });
    renderObserver(ctx2, testScene(), bad);
    expect(ctx2.texts).toContain("GRASP FAILED: timeout");
  });
});
