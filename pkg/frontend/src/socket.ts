// Thin WebSocket wrapper: queue outbound envelopes while connecting, hand
// decoded frames to a single listener, report connection state changes.

import { CommandEnvelope, ServerFrame, decodeFrame, encodeCommand } from './protocol';

export class SessionSocket {
  private ws: WebSocket | null = null;
  private queue: string[] = [];

  constructor(
    private url: string,
    private onFrame: (frame: ServerFrame) => void,
    private onState: (connected: boolean) => void,
  ) {}

  connect(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.onState(true);
      for (const raw of this.queue.splice(0)) ws.send(raw);
    };
    ws.onmessage = (ev: MessageEvent) => {
      try {
        this.onFrame(decodeFrame(String(ev.data)));
      } catch {
        // ignore undecodable frames; the view model keeps its last good state
      }
    };
    ws.onclose = () => this.onState(false);
    ws.onerror = () => this.onState(false);
  }

  send(cmd: CommandEnvelope): void {
    const raw = encodeCommand(cmd);
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(raw);
    } else {
      this.queue.push(raw);
    }
  }
}
