// Client settings with local persistence. Blindfold is the default so a
// subject station never flashes the arena; the observer view is opt-in
// and mutually exclusive with the blindfold.

export interface KeyBindings {
  forward: string[];
  backward: string[];
  turnLeft: string[];
  turnRight: string[];
  aimUp: string[];
  aimDown: string[];
  aimLeft: string[];
  aimRight: string[];
  rotateCw: string[];
  rotateCcw: string[];
  reachOut: string[];
  reachIn: string[];
  closeHand: string[];
  openHand: string[];
}

export interface ClientSettings {
  serverAddress: string;
  blindfold: boolean;
  masterVolume: number; // 0..1
  observerView: boolean;
  bindings: KeyBindings;
}

// Arrow keys and WASD both steer; IJKL aims the wrist, U/O rolls it.
// R/F extend and retract the reach (the wire input supports it and the
// grasp band usually needs it, even though it has no letter-key lore).
export const DEFAULT_BINDINGS: KeyBindings = {
  forward: ["KeyW", "ArrowUp"],
  backward: ["KeyS", "ArrowDown"],
  turnLeft: ["KeyA", "ArrowLeft"],
  turnRight: ["KeyD", "ArrowRight"],
  aimUp: ["KeyI"],
  aimDown: ["KeyK"],
  aimLeft: ["KeyJ"],
  aimRight: ["KeyL"],
  rotateCcw: ["KeyU"],
  rotateCw: ["KeyO"],
  reachOut: ["KeyR"],
  reachIn: ["KeyF"],
  closeHand: ["Space"],
  openHand: ["Enter"],
};

export const DEFAULT_SETTINGS: ClientSettings = {
  serverAddress: "ws://127.0.0.1:8765/session",
  blindfold: true,
  masterVolume: 0.8,
  observerView: false,
  bindings: DEFAULT_BINDINGS,
};

const STORAGE_KEY = "echograsp.settings";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export function validateSettings(s: ClientSettings): string[] {
  const problems: string[] = [];
  if (!s.serverAddress.startsWith("ws://") && !s.serverAddress.startsWith("wss://")) {
    problems.push("serverAddress must be a ws:// or wss:// URL");
  }
  if (!(s.masterVolume >= 0 && s.masterVolume <= 1)) {
    problems.push("masterVolume must be within [0, 1]");
  }
  for (const [action, codes] of Object.entries(s.bindings)) {
    if (!Array.isArray(codes) || codes.length === 0) {
      problems.push(`binding for ${action} must list at least one key`);
    }
  }
  return problems;
}

export function loadSettings(storage: StorageLike): ClientSettings {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw === null) return { ...DEFAULT_SETTINGS };
  let parsed: Partial<ClientSettings>;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return { ...DEFAULT_SETTINGS };
  }
  const merged: ClientSettings = {
    ...DEFAULT_SETTINGS,
    ...parsed,
    bindings: { ...DEFAULT_BINDINGS, ...(parsed.bindings ?? {}) },
  };
  return validateSettings(merged).length === 0 ? merged : { ...DEFAULT_SETTINGS };
}

export function saveSettings(storage: StorageLike, settings: ClientSettings): void {
  const problems = validateSettings(settings);
  if (problems.length > 0) {
    throw new Error(`refusing to save invalid settings: ${problems.join("; ")}`);
  }
  storage.setItem(STORAGE_KEY, JSON.stringify(settings));
}

// Blindfold wins over everything: no canvas, no HUD.
export function visibleViews(s: ClientSettings): { arena: boolean; hud: boolean } {
  if (s.blindfold) return { arena: false, hud: false };
  return { arena: s.observerView, hud: true };
}
