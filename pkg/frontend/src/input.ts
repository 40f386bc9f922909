// Keyboard state -> input messages.
//
// Locomotion fields are rates (m/s, deg/s) the server integrates by its
// own tick; wrist fields are raw per-tick deltas, so they must be scaled
// by the arena tick to express a per-second rate. That split mirrors the
// wire contract, hence the tickSeconds argument on snapshot().

import { InputMessage } from "./protocol";
import { KeyBindings } from "./settings";

export const WALK_SPEED = 1.0; // m/s while a forward key is held
export const TURN_RATE = 60.0; // deg/s
export const AIM_RATE = 30.0; // deg/s
export const ROTATE_RATE = 45.0; // deg/s
export const REACH_RATE = 0.25; // m/s

export type Action = keyof KeyBindings;

export class InputMap {
  private down = new Set<string>();
  private codeToAction = new Map<string, Action>();

  constructor(bindings: KeyBindings) {
    for (const [action, codes] of Object.entries(bindings) as [Action, string[]][]) {
      for (const code of codes) this.codeToAction.set(code, action);
    }
  }

  // Returns the action bound to the key, letting callers route the two
  // one-shot hand actions (close/open) to commands instead of state.
  keyDown(code: string): Action | null {
    const action = this.codeToAction.get(code) ?? null;
    if (action !== null) this.down.add(code);
    return action;
  }

  keyUp(code: string): void {
    this.down.delete(code);
  }

  reset(): void {
    this.down.clear();
  }

  isActive(action: Action): boolean {
    for (const code of this.down) {
      if (this.codeToAction.get(code) === action) return true;
    }
    return false;
  }

  private axis(positive: Action, negative: Action): number {
    return (this.isActive(positive) ? 1 : 0) - (this.isActive(negative) ? 1 : 0);
  }

  snapshot(tickSeconds: number): InputMessage {
    return {
      type: "input",
      forward: this.axis("forward", "backward") * WALK_SPEED,
      turn: this.axis("turnLeft", "turnRight") * TURN_RATE,
      aim_azimuth_delta: this.axis("aimLeft", "aimRight") * AIM_RATE * tickSeconds,
      aim_elevation_delta: this.axis("aimUp", "aimDown") * AIM_RATE * tickSeconds,
      reach_delta: this.axis("reachOut", "reachIn") * REACH_RATE * tickSeconds,
      rotation_delta: this.axis("rotateCcw", "rotateCw") * ROTATE_RATE * tickSeconds,
    };
  }
}

export function sameInput(a: InputMessage, b: InputMessage): boolean {
  return (
    a.forward === b.forward &&
    a.turn === b.turn &&
    a.aim_azimuth_delta === b.aim_azimuth_delta &&
    a.aim_elevation_delta === b.aim_elevation_delta &&
    a.reach_delta === b.reach_delta &&
    a.rotation_delta === b.rotation_delta
  );
}
