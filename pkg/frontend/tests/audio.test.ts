import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import {
  BEACON_FREQ_HZ,
  ContextLike,
  CueRenderer,
  DelayLike,
  GainLike,
  NodeLike,
  OscillatorLike,
  PROXIMITY_FREQ_HZ,
  ParamLike,
  SMOOTHING_TIME_CONSTANT,
  panFromGains,
} from "../src/audio";
import { AudioCue, Frame, SceneMessage } from "../src/protocol";

interface ParamCall {
  method: string;
  args: number[];
}

class FakeParam implements ParamLike {
  value = 0;
  log: ParamCall[] = [];

  setTargetAtTime(target: number, startTime: number, timeConstant: number): void {
    this.log.push({ method: "setTargetAtTime", args: [target, startTime, timeConstant] });
    this.value = target;
  }
  setValueAtTime(value: number, startTime: number): void {
    this.log.push({ method: "setValueAtTime", args: [value, startTime] });
    this.value = value;
  }
  cancelScheduledValues(startTime: number): void {
    this.log.push({ method: "cancelScheduledValues", args: [startTime] });
  }
  lastTarget(): number | null {
    for (let i = this.log.length - 1; i >= 0; i--) {
      if (this.log[i].method === "setTargetAtTime") return this.log[i].args[0];
    }
    return null;
  }
}

class FakeNode implements NodeLike {
  connections: { to: unknown; output?: number; input?: number }[] = [];
  constructor(public name: string) {}
  connect(destination: unknown, output?: number, input?: number): void {
    this.connections.push({ to: destination, output, input });
  }
  connectsTo(other: unknown): boolean {
    return this.connections.some((c) => c.to === other);
  }
}

class FakeOsc extends FakeNode implements OscillatorLike {
  frequency = new FakeParam();
  started = 0;
  start(): void {
    this.started++;
  }
}

class FakeGain extends FakeNode implements GainLike {
  gain = new FakeParam();
}

class FakeDelay extends FakeNode implements DelayLike {
  delayTime = new FakeParam();
}

class FakeContext implements ContextLike {
  currentTime = 0;
  destination = new FakeNode("destination");
  oscillators: FakeOsc[] = [];
  gains: FakeGain[] = [];
  delays: FakeDelay[] = [];
  mergers: FakeNode[] = [];

  createOscillator(): FakeOsc {
    const node = new FakeOsc(`osc${this.oscillators.length}`);
    this.oscillators.push(node);
    return node;
  }
  createGain(): FakeGain {
    const node = new FakeGain(`gain${this.gains.length}`);
    this.gains.push(node);
    return node;
  }
  createDelay(): FakeDelay {
    const node = new FakeDelay(`delay${this.delays.length}`);
    this.delays.push(node);
    return node;
  }
  createChannelMerger(): FakeNode {
    const node = new FakeNode(`merger${this.mergers.length}`);
    this.mergers.push(node);
    return node;
  }
}

function build(volume = 0.8): {
  ctx: FakeContext;
  renderer: CueRenderer;
  beepGate: FakeGain;
  left: FakeGain;
  right: FakeGain;
  master: FakeGain;
  leftDelay: FakeDelay;
  rightDelay: FakeDelay;
} {
  const ctx = new FakeContext();
  const renderer = new CueRenderer(ctx, volume);
  // Creation order inside the constructor: beepGate, left, right, master.
  const [beepGate, left, right, master] = ctx.gains;
  const [leftDelay, rightDelay] = ctx.delays;
  return { ctx, renderer, beepGate, left, right, master, leftDelay, rightDelay };
}

function cue(overrides: Partial<AudioCue> = {}): AudioCue {
  return {
    left_gain: 0.5,
    right_gain: 0.5,
    itd_us: 0,
    beep_period_ms: null,
    source: "beacon",
    ...overrides,
  };
}

describe("CueRenderer graph", () => {
  it("wires osc -> gate -> ear gains -> delays -> merger -> master -> out", () => {
    const { ctx, beepGate, left, right, master, leftDelay, rightDelay } = build(0.6);
    const osc = ctx.oscillators[0];
    const merger = ctx.mergers[0];
    expect(osc.connectsTo(beepGate)).toBe(true);
    expect(beepGate.connectsTo(left)).toBe(true);
    expect(beepGate.connectsTo(right)).toBe(true);
    expect(left.connectsTo(leftDelay)).toBe(true);
    expect(right.connectsTo(rightDelay)).toBe(true);
    expect(leftDelay.connections).toEqual([{ to: merger, output: 0, input: 0 }]);
    expect(rightDelay.connections).toEqual([{ to: merger, output: 0, input: 1 }]);
    expect(merger.connectsTo(master)).toBe(true);
    expect(master.connectsTo(ctx.destination)).toBe(true);
    expect(osc.started).toBe(1);
    expect(master.gain.value).toBe(0.6);
    expect(osc.frequency.value).toBe(BEACON_FREQ_HZ);
  });

  it("setMasterVolume retunes only the master gain", () => {
    const { renderer, master, left } = build();
    renderer.setMasterVolume(0.2);
    expect(master.gain.lastTarget()).toBe(0.2);
    expect(left.gain.log).toHaveLength(0);
  });
});

describe("CueRenderer.applyCue", () => {
  it("approaches the ear gains with the click-free time constant", () => {
    const { renderer, left, right } = build();
    renderer.applyCue(cue({ left_gain: 0.3, right_gain: 0.7 }));
    const l = left.gain.log.at(-1)!;
    expect(l.method).toBe("setTargetAtTime");
    expect(l.args[0]).toBe(0.3);
    expect(l.args[2]).toBe(SMOOTHING_TIME_CONSTANT);
    expect(right.gain.lastTarget()).toBe(0.7);
  });

  it("delays the left line for a positive itd and vice versa", () => {
    const { renderer, leftDelay, rightDelay } = build();
    renderer.applyCue(cue({ itd_us: 400 }));
    expect(leftDelay.delayTime.lastTarget()).toBeCloseTo(400e-6, 12);
    expect(rightDelay.delayTime.lastTarget()).toBe(0);

    renderer.applyCue(cue({ itd_us: -250 }));
    expect(leftDelay.delayTime.lastTarget()).toBe(0);
    expect(rightDelay.delayTime.lastTarget()).toBeCloseTo(250e-6, 12);
  });

  it("picks the tone frequency per cue source", () => {
    const { ctx, renderer } = build();
    const osc = ctx.oscillators[0];
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 500 }));
    expect(osc.frequency.lastTarget()).toBe(PROXIMITY_FREQ_HZ);
    renderer.applyCue(cue({ source: "beacon" }));
    expect(osc.frequency.lastTarget()).toBe(BEACON_FREQ_HZ);
  });

  it("fades both ears out for a null cue", () => {
    const { renderer, left, right } = build();
    renderer.applyCue(cue({ left_gain: 0.4, right_gain: 0.6 }));
    renderer.applyCue(null);
    expect(left.gain.lastTarget()).toBe(0);
    expect(right.gain.lastTarget()).toBe(0);
  });
});

describe("CueRenderer beep gating", () => {
  it("holds the gate open for a continuous tone and schedules it once", () => {
    const { renderer, beepGate } = build();
    renderer.applyCue(cue({ beep_period_ms: null }));
    expect(beepGate.gain.lastTarget()).toBe(1);
    const calls = beepGate.gain.log.length;
    renderer.applyCue(cue({ beep_period_ms: null }));
    expect(beepGate.gain.log.length).toBe(calls);
  });

  it("schedules a pulse train covering the horizon", () => {
    const { renderer, beepGate } = build();
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 200 }));
    const sets = beepGate.gain.log.filter((c) => c.method === "setValueAtTime");
    // Pulses at 0, 0.2, 0.4 with 40 ms on-time each.
    expect(sets.map((c) => c.args[0])).toEqual([1, 0, 1, 0, 1, 0]);
    const expectedTimes = [0, 0.04, 0.2, 0.24, 0.4, 0.44];
    sets.forEach((c, i) => expect(c.args[1]).toBeCloseTo(expectedTimes[i], 9));
  });

  it("leaves a still-covered schedule alone, then extends it", () => {
    const { ctx, renderer, beepGate } = build();
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 200 }));
    const after = beepGate.gain.log.length;

    ctx.currentTime = 0.02;
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 200 }));
    expect(beepGate.gain.log.length).toBe(after);

    // Past the half-horizon point the train grows from its old end.
    ctx.currentTime = 0.4;
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 200 }));
    const sets = beepGate.gain.log.filter((c) => c.method === "setValueAtTime");
    const times = sets.map((c) => c.args[1]);
    expect(Math.max(...times)).toBeGreaterThanOrEqual(0.8);
    // No pulse was re-anchored before the old end.
    expect(times.filter((t) => t > 0.44 && t < 0.6)).toHaveLength(0);
  });

  it("re-anchors immediately when the cadence changes", () => {
    const { ctx, renderer, beepGate } = build();
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 200 }));
    ctx.currentTime = 0.1;
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 100 }));
    const log = beepGate.gain.log;
    const lastCancel = log.map((c) => c.method).lastIndexOf("cancelScheduledValues");
    expect(log[lastCancel].args[0]).toBe(0.1);
    const sets = log.slice(lastCancel + 1).filter((c) => c.method === "setValueAtTime");
    expect(sets[0].args).toEqual([1, 0.1]);
    expect(sets[2].args[0]).toBe(1);
    expect(sets[2].args[1]).toBeCloseTo(0.2, 9);
  });

  it("shortens the on-time for fast cadences", () => {
    const { renderer, beepGate } = build();
    renderer.applyCue(cue({ source: "proximity", beep_period_ms: 60 }));
    const sets = beepGate.gain.log.filter((c) => c.method === "setValueAtTime");
    expect(sets[0].args).toEqual([1, 0]);
    expect(sets[1].args[1]).toBeCloseTo(0.03, 12);
  });
});

describe("panFromGains", () => {
  it("recovers the signed pan from a constant-power pair", () => {
    expect(panFromGains(0.6, 0.8)).toBeCloseTo(0.28, 12);
    expect(panFromGains(0.8, 0.6)).toBeCloseTo(-0.28, 12);
    expect(panFromGains(0.5, 0.5)).toBe(0);
  });

  it("is zero for silence", () => {
    expect(panFromGains(0, 0)).toBe(0);
  });

  it("ignores overall attenuation", () => {
    expect(panFromGains(0.06, 0.08)).toBeCloseTo(panFromGains(0.6, 0.8), 12);
  });
});

// --- recorded-session check: pan sign tracks the source azimuth ---

function normalizeDegrees(angle: number): number {
  let a = angle % 360;
  if (a <= -180) a += 360;
  else if (a > 180) a -= 360;
  return a;
}

// The serialized pose is at most one control step past the pose the cue
// was rendered from, so the recomputed azimuth can be off by a couple of
// degrees; a small dead zone keeps the sign comparison meaningful.
const AZIMUTH_DEAD_ZONE_DEG = 0.5;

describe("recorded session pan sign", () => {
  const raw = readFileSync(new URL("./fixtures/session_trace.json", import.meta.url), "utf8");
  const trace = JSON.parse(raw) as { scene: SceneMessage; frames: Frame[] };
  const positions = new Map(trace.scene.objects.map((o) => [o.kind, o.position]));

  function cueAzimuth(frame: Frame): number | null {
    const c = frame.audio_cue;
    if (c === null) return null;
    const av = frame.avatar;
    if (c.source === "beacon") {
      const s = positions.get("sound_source")!;
      return normalizeDegrees(
        (Math.atan2(s[1] - av.y, s[0] - av.x) * 180) / Math.PI - av.heading,
      );
    }
    const h = (av.heading * Math.PI) / 180;
    const [ox, oy] = frame.wrist.offset;
    const wx = av.x + ox * Math.cos(h) - oy * Math.sin(h);
    const wy = av.y + ox * Math.sin(h) + oy * Math.cos(h);
    const b = positions.get("bottle")!;
    return normalizeDegrees((Math.atan2(b[1] - wy, b[0] - wx) * 180) / Math.PI - av.heading);
  }

  it("matches the azimuth sign on every audible frame", () => {
    const checked = { beacon: 0, proximity: 0 };
    for (const frame of trace.frames) {
      const az = cueAzimuth(frame);
      if (az === null || Math.abs(az) < AZIMUTH_DEAD_ZONE_DEG) continue;
      const c = frame.audio_cue!;
      const pan = panFromGains(c.left_gain, c.right_gain);
      expect(Math.sign(pan), `tick ${frame.tick}: az ${az.toFixed(2)} pan ${pan.toFixed(4)}`).toBe(
        Math.sign(az),
      );
      expect(Math.abs(pan - Math.sin((az * Math.PI) / 180))).toBeLessThan(0.1);
      checked[c.source as "beacon" | "proximity"]++;
    }
    expect(checked.beacon).toBeGreaterThan(50);
    expect(checked.proximity).toBeGreaterThan(5);
  });

  it("agrees with the itd sign too", () => {
    for (const frame of trace.frames) {
      const c = frame.audio_cue;
      if (c === null || Math.abs(c.itd_us) < 10) continue;
      const pan = panFromGains(c.left_gain, c.right_gain);
      if (pan === 0) continue;
      expect(Math.sign(c.itd_us)).toBe(Math.sign(pan));
    }
  });
});
