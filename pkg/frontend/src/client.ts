// Session transport. The socket is injected as a minimal interface so
// tests (and the node e2e harness) can drive the client without a DOM.
// The client never mutates simulation state except through the documented
// messages it sends here.

import {
  AckMessage,
  ClientMessage,
  Frame,
  InputMessage,
  parseServerMessage,
  SceneMessage,
  SessionConfigEcho,
} from "./protocol";
import { sameInput } from "./input";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  set onmessage(handler: (event: { data: unknown }) => void);
  set onclose(handler: () => void);
  set onerror(handler: (err: unknown) => void);
  set onopen(handler: () => void);
}

export interface SessionInfo {
  sessionId: number;
  mode: string;
  config: SessionConfigEcho;
}

export interface ClientHandlers {
  onFrame?: (frame: Frame) => void;
  onScene?: (scene: SceneMessage) => void;
  onAck?: (ack: AckMessage) => void;
  onClose?: () => void;
}

const INPUT_MIN_INTERVAL_MS = 20; // at most 50 input messages per second

export class SessionClient {
  private socket: SocketLike;
  private handlers: ClientHandlers;
  private pendingAck: ((ack: AckMessage) => void)[] = [];
  private lastInputSentAt = -Infinity;
  private lastInput: InputMessage | null = null;
  private queuedInput: InputMessage | null = null;
  private inputTimer: ReturnType<typeof setTimeout> | null = null;
  private now: () => number;

  constructor(socket: SocketLike, handlers: ClientHandlers = {}, now: () => number = Date.now) {
    this.socket = socket;
    this.handlers = handlers;
    this.now = now;
    socket.onmessage = (event) => this.handleRaw(String(event.data));
    socket.onclose = () => {
      this.handlers.onClose?.();
    };
    socket.onerror = () => {
      /* close follows; nothing useful to do here */
    };
  }

  // First exchange on a fresh socket: create the session, resolve on its ack.
  createSession(config: Record<string, unknown> = {}): Promise<SessionInfo> {
    return new Promise((resolve, reject) => {
      this.pendingAck.push((ack) => {
        if (!ack.ok) {
          reject(new Error(`session rejected: ${ack.error?.code}: ${ack.error?.message}`));
          return;
        }
        resolve({
          sessionId: ack.session_id as number,
          mode: ack.mode as string,
          config: ack.config as SessionConfigEcho,
        });
      });
      this.sendRaw({ type: "create_session", config });
    });
  }

  sendCommand(text: string): void {
    this.sendRaw({ type: "command", text });
  }

  pause(): void {
    this.sendRaw({ type: "pause" });
  }

  resume(): void {
    this.sendRaw({ type: "resume" });
  }

  // Coalesced and throttled: unchanged state is never re-sent, and bursts
  // collapse to one trailing update inside the 50 Hz budget.
  sendInput(input: InputMessage): void {
    if (this.lastInput !== null && sameInput(this.lastInput, input) && this.queuedInput === null) {
      return;
    }
    const elapsed = this.now() - this.lastInputSentAt;
    if (elapsed >= INPUT_MIN_INTERVAL_MS) {
      this.flushInput(input);
      return;
    }
    this.queuedInput = input;
    if (this.inputTimer === null) {
      this.inputTimer = setTimeout(() => {
        this.inputTimer = null;
        if (this.queuedInput !== null) {
          const queued = this.queuedInput;
          this.queuedInput = null;
          this.sendInput(queued);
        }
      }, INPUT_MIN_INTERVAL_MS - elapsed);
    }
  }

  close(): void {
    if (this.inputTimer !== null) clearTimeout(this.inputTimer);
    this.socket.close();
  }

  private flushInput(input: InputMessage): void {
    this.lastInput = input;
    this.lastInputSentAt = this.now();
    this.sendRaw(input);
  }

  private sendRaw(message: ClientMessage): void {
    this.socket.send(JSON.stringify(message));
  }

  private handleRaw(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg.type === "ack") {
      const waiter = this.pendingAck.shift();
      if (waiter) {
        waiter(msg);
      } else {
        this.handlers.onAck?.(msg);
      }
      return;
    }
    if (msg.type === "scene") {
      this.handlers.onScene?.(msg);
      return;
    }
    this.handlers.onFrame?.(msg);
  }
}
