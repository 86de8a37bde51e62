/**
 * WebSocket client with automatic reconnect. Backoff starts at 0.5 s and
 * doubles to an 8 s ceiling; a successful connection resets it.
 */

export interface SocketCallbacks {
  onMessage: (data: string) => void;
  onStatus: (connected: boolean) => void;
}

export class ReconnectingSocket {
  private ws: WebSocket | null = null;
  private backoffMs = 500;
  private closed = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private callbacks: SocketCallbacks,
  ) {}

  connect(): void {
    if (this.closed) return;
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.backoffMs = 500;
      this.callbacks.onStatus(true);
    };
    this.ws.onmessage = (ev: MessageEvent) => {
      this.callbacks.onMessage(typeof ev.data === "string" ? ev.data : "");
    };
    this.ws.onclose = () => {
      this.ws = null;
      this.callbacks.onStatus(false);
      if (!this.closed) {
        this.timer = setTimeout(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, 8000);
      }
    };
    this.ws.onerror = () => {
      this.ws?.close();
    };
  }

  send(payload: unknown): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(payload));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    if (this.timer) clearTimeout(this.timer);
    this.ws?.close();
  }
}
