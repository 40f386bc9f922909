// Voice prompts: spoken when a speech engine exists, always transcribed.
// A prompt is an event, not a state, so replayed or out-of-order frames
// must never re-speak one; the tick watermark enforces that.

export type Speaker = (text: string) => void;

export interface TranscriptLine {
  tick: number;
  text: string;
}

export class Transcript {
  readonly lines: TranscriptLine[] = [];
  private speaker: Speaker | null;
  private lastTick = -1;

  constructor(speaker: Speaker | null = null) {
    this.speaker = speaker;
  }

  // Returns true when the prompt was accepted as new.
  addPrompt(tick: number, text: string): boolean {
    if (text.length === 0) {
      throw new Error("empty prompt text");
    }
    if (tick <= this.lastTick) {
      return false; // replay or duplicate frame
    }
    this.lastTick = tick;
    this.lines.push({ tick, text });
    this.speaker?.(text);
    return true;
  }

  counts(): Map<string, number> {
    const out = new Map<string, number>();
    for (const line of this.lines) {
      out.set(line.text, (out.get(line.text) ?? 0) + 1);
    }
    return out;
  }
}
