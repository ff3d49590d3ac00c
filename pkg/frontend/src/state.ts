/** Client-side session state, rebuilt purely from the service's event
 * stream. The console never mutates state on its own: optimistic bubbles are
 * a separate overlay that dissolves once the matching event arrives, so a
 * reload always reconstructs the identical view.
 *
 * Events are applied strictly in sequence-number order; anything arriving
 * early is buffered, duplicates are dropped.
 */

import type {
  LanguageGuess,
  Sender,
  SessionEvent,
  SessionView,
  Turn,
  TurnPrompt,
} from "./types.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface PendingBubble {
  localId: number;
  sender: Sender;
  text: string;
}

export class ConsoleStore {
  view: SessionView | null = null;
  connection: ConnectionStatus = "connecting";
  pending: PendingBubble[] = [];

  private nextSeq = 1;
  private buffered = new Map<number, SessionEvent>();
  private nextLocalId = 1;
  private listeners = new Set<() => void>();

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  setConnection(status: ConnectionStatus): void {
    if (this.connection !== status) {
      this.connection = status;
      this.notify();
    }
  }

  /** Sequence number of the last applied event (0 before `created`). */
  get lastSeq(): number {
    return this.nextSeq - 1;
  }

  applyEvent(event: SessionEvent): void {
    if (event.seq < this.nextSeq) return; // duplicate (e.g. reconnect overlap)
    if (event.seq > this.nextSeq) {
      this.buffered.set(event.seq, event);
      return;
    }
    this.applyNow(event);
    this.nextSeq += 1;
    let queued;
    while ((queued = this.buffered.get(this.nextSeq)) !== undefined) {
      this.buffered.delete(this.nextSeq);
      this.applyNow(queued);
      this.nextSeq += 1;
    }
    this.notify();
  }

  private applyNow(event: SessionEvent): void {
    const payload = event.payload;
    switch (event.kind) {
      case "created":
        this.view = {
          session_id: payload["session_id"] as string,
          customer_language: payload["customer_language"] as string,
          agent_language: payload["agent_language"] as string,
          created_at: payload["created_at"] as number,
          turns: [],
          summary: { text: "", covered_turns: 0 },
        };
        break;
      case "message_posted": {
        if (!this.view) return;
        const turn: Turn = {
          turn_index: payload["turn_index"] as number,
          sender: payload["sender"] as Sender,
          original: payload["original"] as string,
          posted_at: payload["posted_at"] as number,
          prompt: payload["prompt"] as unknown as TurnPrompt,
          translation: null,
          status: "pending",
          language_guess: null,
          mismatched: false,
          generations: 0,
          completed_at: null,
          error: null,
        };
        this.view.turns.push(turn);
        this.resolvePending(turn.sender, turn.original);
        break;
      }
      case "summary_updated":
        if (!this.view) return;
        this.view.summary = {
          text: payload["text"] as string,
          covered_turns: payload["covered_turns"] as number,
        };
        break;
      case "translated": {
        if (!this.view) return;
        const turn = this.view.turns[payload["turn_index"] as number];
        if (!turn) return;
        turn.translation = (payload["translation"] as string | null) ?? null;
        turn.status = payload["status"] as Turn["status"];
        turn.language_guess = (payload["language_guess"] as LanguageGuess | undefined) ?? null;
        turn.mismatched = (payload["mismatched"] as boolean | undefined) ?? false;
        turn.generations = (payload["generations"] as number | undefined) ?? 0;
        turn.completed_at = (payload["completed_at"] as number | undefined) ?? null;
        turn.error = (payload["error"] as string | undefined) ?? null;
        break;
      }
    }
  }

  // -- optimistic overlay ---------------------------------------------------

  addPending(sender: Sender, text: string): number {
    const localId = this.nextLocalId++;
    this.pending.push({ localId, sender, text });
    this.notify();
    return localId;
  }

  dropPending(localId: number): void {
    this.pending = this.pending.filter((bubble) => bubble.localId !== localId);
    this.notify();
  }

  private resolvePending(sender: Sender, text: string): void {
    const index = this.pending.findIndex(
      (bubble) => bubble.sender === sender && bubble.text === text,
    );
    if (index >= 0) this.pending.splice(index, 1);
  }

  // -- derived views ----------------------------------------------------------

  /** Indices of the turns the NEXT message will see verbatim (last <= 2). */
  historyWindow(): number[] {
    if (!this.view) return [];
    const count = this.view.turns.length;
    const indices = [];
    for (let i = Math.max(0, count - 2); i < count; i++) indices.push(i);
    return indices;
  }

  summaryLength(): number {
    return this.view ? [...this.view.summary.text].length : 0;
  }
}
