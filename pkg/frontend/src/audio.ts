// Binaural cue rendering on top of WebAudio.
//
// One oscillator feeds a beep gate, then splits into independent per-ear
// gain and delay lines merged into a stereo pair. Cue updates retune the
// params with a short exponential approach (time constant 5 ms, settled
// well inside 20 ms) so consecutive frames never click.

import { AudioCue } from "./protocol";

// Structural slices of the WebAudio interfaces: enough to run in a
// browser, small enough to fake in a node test.
export interface ParamLike {
  value: number;
  setTargetAtTime(target: number, startTime: number, timeConstant: number): unknown;
  setValueAtTime(value: number, startTime: number): unknown;
  cancelScheduledValues(startTime: number): unknown;
}

export interface NodeLike {
  connect(destination: NodeLike | unknown, output?: number, input?: number): unknown;
}

export interface OscillatorLike extends NodeLike {
  frequency: ParamLike;
  start(when?: number): void;
}

export interface GainLike extends NodeLike {
  gain: ParamLike;
}

export interface DelayLike extends NodeLike {
  delayTime: ParamLike;
}

export interface ContextLike {
  currentTime: number;
  destination: unknown;
  createOscillator(): OscillatorLike;
  createGain(): GainLike;
  createDelay(maxDelayTime?: number): DelayLike;
  createChannelMerger(numberOfInputs?: number): NodeLike;
}

export const SMOOTHING_TIME_CONSTANT = 0.005; // seconds; ~15 ms to settle
export const BEACON_FREQ_HZ = 440;
export const PROXIMITY_FREQ_HZ = 880;
const BEEP_SCHEDULE_HORIZON_S = 0.5;
const MAX_ITD_S = 0.002;

// Signed pan recovered from the per-ear gains: positive means the right
// channel carries more power. Zero for silence.
export function panFromGains(leftGain: number, rightGain: number): number {
  const l2 = leftGain * leftGain;
  const r2 = rightGain * rightGain;
  const total = l2 + r2;
  if (total <= 0) return 0;
  return (r2 - l2) / total;
}

export class CueRenderer {
  private ctx: ContextLike;
  private osc: OscillatorLike;
  private beepGate: GainLike;
  private left: GainLike;
  private right: GainLike;
  private leftDelay: DelayLike;
  private rightDelay: DelayLike;
  private master: GainLike;
  private beepScheduledUntil = 0;
  private beepPeriodMs: number | null = null;

  constructor(ctx: ContextLike, masterVolume: number) {
    this.ctx = ctx;
    this.osc = ctx.createOscillator();
    this.beepGate = ctx.createGain();
    this.left = ctx.createGain();
    this.right = ctx.createGain();
    this.leftDelay = ctx.createDelay(MAX_ITD_S);
    this.rightDelay = ctx.createDelay(MAX_ITD_S);
    this.master = ctx.createGain();
    const merger = ctx.createChannelMerger(2);

    this.osc.frequency.value = BEACON_FREQ_HZ;
    this.beepGate.gain.value = 0;
    this.left.gain.value = 0;
    this.right.gain.value = 0;
    this.leftDelay.delayTime.value = 0;
    this.rightDelay.delayTime.value = 0;
    this.master.gain.value = masterVolume;

    this.osc.connect(this.beepGate);
    this.beepGate.connect(this.left);
    this.beepGate.connect(this.right);
    this.left.connect(this.leftDelay);
    this.right.connect(this.rightDelay);
    this.leftDelay.connect(merger, 0, 0);
    this.rightDelay.connect(merger, 0, 1);
    merger.connect(this.master);
    this.master.connect(ctx.destination);
    this.osc.start();
  }

  setMasterVolume(volume: number): void {
    this.master.gain.setTargetAtTime(volume, this.ctx.currentTime, SMOOTHING_TIME_CONSTANT);
  }

  applyCue(cue: AudioCue | null): void {
    const now = this.ctx.currentTime;
    if (cue === null) {
      this.silence(now);
      return;
    }
    this.left.gain.setTargetAtTime(cue.left_gain, now, SMOOTHING_TIME_CONSTANT);
    this.right.gain.setTargetAtTime(cue.right_gain, now, SMOOTHING_TIME_CONSTANT);

    // Positive itd: the right ear leads, so the LEFT line takes the delay.
    const itd = Math.abs(cue.itd_us) * 1e-6;
    const leftLag = cue.itd_us > 0 ? itd : 0;
    const rightLag = cue.itd_us < 0 ? itd : 0;
    this.leftDelay.delayTime.setTargetAtTime(leftLag, now, SMOOTHING_TIME_CONSTANT);
    this.rightDelay.delayTime.setTargetAtTime(rightLag, now, SMOOTHING_TIME_CONSTANT);

    this.osc.frequency.setTargetAtTime(
      cue.source === "proximity" ? PROXIMITY_FREQ_HZ : BEACON_FREQ_HZ,
      now,
      SMOOTHING_TIME_CONSTANT,
    );

    this.scheduleGate(cue.beep_period_ms, now);
  }

  private silence(now: number): void {
    this.left.gain.setTargetAtTime(0, now, SMOOTHING_TIME_CONSTANT);
    this.right.gain.setTargetAtTime(0, now, SMOOTHING_TIME_CONSTANT);
  }

  // Continuous tone for a null period; otherwise a pulse train scheduled a
  // short horizon ahead, re-anchored whenever the cadence changes.
  private scheduleGate(periodMs: number | null, now: number): void {
    if (periodMs === null) {
      if (this.beepPeriodMs !== null || this.beepScheduledUntil === 0) {
        this.beepGate.gain.cancelScheduledValues(now);
        this.beepGate.gain.setTargetAtTime(1, now, SMOOTHING_TIME_CONSTANT);
        this.beepPeriodMs = null;
        this.beepScheduledUntil = Infinity;
      }
      return;
    }
    const cadenceChanged = this.beepPeriodMs === null || Math.abs(this.beepPeriodMs - periodMs) > 1e-9;
    if (!cadenceChanged && this.beepScheduledUntil > now + BEEP_SCHEDULE_HORIZON_S / 2) {
      return; // current schedule still covers the horizon
    }
    const period = periodMs / 1000;
    const onTime = Math.min(0.04, period / 2);
    let t = cadenceChanged ? now : this.beepScheduledUntil;
    this.beepGate.gain.cancelScheduledValues(t);
    const until = now + BEEP_SCHEDULE_HORIZON_S;
    while (t < until) {
      this.beepGate.gain.setValueAtTime(1, t);
      this.beepGate.gain.setValueAtTime(0, t + onTime);
      t += period;
    }
    this.beepPeriodMs = periodMs;
    this.beepScheduledUntil = t;
  }
}
