// Browser entry point. Everything testable lives in the other modules;
// this file only wires DOM events to them.

import { CueRenderer } from "./audio";
import { SessionClient, SocketLike } from "./client";
import { InputMap } from "./input";
import { Frame, SceneMessage } from "./protocol";
import { loadSettings, saveSettings, visibleViews } from "./settings";
import { renderObserver } from "./observer";
import { Transcript } from "./transcript";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const settings = loadSettings(window.localStorage);
  const canvas = el<HTMLCanvasElement>("arena");
  const hud = el<HTMLDivElement>("hud");
  const banner = el<HTMLDivElement>("banner");
  const transcriptBox = el<HTMLDivElement>("transcript");
  const commandBox = el<HTMLInputElement>("command");
  const blindfoldToggle = el<HTMLInputElement>("blindfold");
  const observerToggle = el<HTMLInputElement>("observer");
  const connectButton = el<HTMLButtonElement>("connect");

  blindfoldToggle.checked = settings.blindfold;
  observerToggle.checked = settings.observerView;

  const speak =
    "speechSynthesis" in window
      ? (text: string) => window.speechSynthesis.speak(new SpeechSynthesisUtterance(text))
      : null;
  const transcript = new Transcript(speak);

  let renderer: CueRenderer | null = null;
  let client: SessionClient | null = null;
  let inputMap: InputMap | null = null;
  let scene: SceneMessage | null = null;
  let lastFrame: Frame | null = null;
  let tickSeconds = 0.02;

  function applyVisibility(): void {
    const views = visibleViews(settings);
    canvas.style.display = views.arena ? "block" : "none";
    hud.style.display = views.hud ? "block" : "none";
  }

  function persist(): void {
    try {
      saveSettings(window.localStorage, settings);
    } catch {
      /* leave previous values */
    }
  }

  blindfoldToggle.addEventListener("change", () => {
    settings.blindfold = blindfoldToggle.checked;
    applyVisibility();
    persist();
  });
  observerToggle.addEventListener("change", () => {
    settings.observerView = observerToggle.checked;
    applyVisibility();
    persist();
  });

  connectButton.addEventListener("click", async () => {
    // User gesture: safe point to spin up audio. A missing device shows a
    // banner but the session continues silent.
    try {
      const ctx = new AudioContext();
      renderer = new CueRenderer(ctx, settings.masterVolume);
      banner.textContent = "";
    } catch {
      renderer = null;
      banner.textContent = "audio unavailable: running without sound";
    }

    const socket = new WebSocket(settings.serverAddress) as unknown as SocketLike;
    client = new SessionClient(socket, {
      onScene: (msg) => {
        scene = msg;
      },
      onFrame: (frame) => {
        lastFrame = frame;
        renderer?.applyCue(frame.audio_cue);
        if (frame.prompt !== null) {
          if (transcript.addPrompt(frame.tick, frame.prompt)) {
            const line = document.createElement("div");
            line.textContent = frame.prompt;
            transcriptBox.appendChild(line);
          }
        }
      },
      onClose: () => {
        banner.textContent = "connection closed";
      },
    });
    await new Promise<void>((resolve) => {
      (socket as { onopen: () => void }).onopen = () => resolve();
    });
    const info = await client.createSession({ mode: "human_driven" });
    tickSeconds = info.config.arena.tick;
    inputMap = new InputMap(settings.bindings);
    banner.textContent = `session ${info.sessionId} (${info.mode})`;
  });

  document.addEventListener("keydown", (event) => {
    if (document.activeElement === commandBox || !client || !inputMap) return;
    const action = inputMap.keyDown(event.code);
    if (action === "closeHand") {
      client.sendCommand("close");
      inputMap.keyUp(event.code);
    } else if (action === "openHand") {
      client.sendCommand("open");
      inputMap.keyUp(event.code);
    } else if (action !== null) {
      client.sendInput(inputMap.snapshot(tickSeconds));
      event.preventDefault();
    }
  });
  document.addEventListener("keyup", (event) => {
    if (!client || !inputMap) return;
    inputMap.keyUp(event.code);
    client.sendInput(inputMap.snapshot(tickSeconds));
  });

  commandBox.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && commandBox.value.trim().length > 0) {
      client?.sendCommand(commandBox.value.trim());
      commandBox.value = "";
      event.stopPropagation();
    }
  });

  function paint(): void {
    const ctx = canvas.getContext("2d");
    if (ctx && scene && lastFrame && visibleViews(settings).arena) {
      renderObserver(ctx, scene, lastFrame);
    }
    requestAnimationFrame(paint);
  }

  applyVisibility();
  paint();
}

document.addEventListener("DOMContentLoaded", main);
