/** Client-side session state, rebuilt purely from the service's event
 * stream. The console never mutates state on its own: optimistic bubbles are
 * a separate overlay that dissolves once the matching event arrives, so a
 * reload always reconstructs the identical view.
 *
 * Events are applied strictly in sequence-number order; anything arriving
 * early is buffered, duplicates are dropped.
 */
export class ConsoleStore {
    view = null;
    connection = "connecting";
    pending = [];
    nextSeq = 1;
    buffered = new Map();
    nextLocalId = 1;
    listeners = new Set();
    subscribe(listener) {
        this.listeners.add(listener);
        return () => this.listeners.delete(listener);
    }
    notify() {
        for (const listener of this.listeners)
            listener();
    }
    setConnection(status) {
        if (this.connection !== status) {
            this.connection = status;
            this.notify();
        }
    }
    /** Sequence number of the last applied event (0 before `created`). */
    get lastSeq() {
        return this.nextSeq - 1;
    }
    applyEvent(event) {
        if (event.seq < this.nextSeq)
            return; // duplicate (e.g. reconnect overlap)
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
    applyNow(event) {
        const payload = event.payload;
        switch (event.kind) {
            case "created":
                this.view = {
                    session_id: payload["session_id"],
                    customer_language: payload["customer_language"],
                    agent_language: payload["agent_language"],
                    created_at: payload["created_at"],
                    turns: [],
                    summary: { text: "", covered_turns: 0 },
                };
                break;
            case "message_posted": {
                if (!this.view)
                    return;
                const turn = {
                    turn_index: payload["turn_index"],
                    sender: payload["sender"],
                    original: payload["original"],
                    posted_at: payload["posted_at"],
                    prompt: payload["prompt"],
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
                if (!this.view)
                    return;
                this.view.summary = {
                    text: payload["text"],
                    covered_turns: payload["covered_turns"],
                };
                break;
            case "translated": {
                if (!this.view)
                    return;
                const turn = this.view.turns[payload["turn_index"]];
                if (!turn)
                    return;
                turn.translation = payload["translation"] ?? null;
                turn.status = payload["status"];
                turn.language_guess = payload["language_guess"] ?? null;
                turn.mismatched = payload["mismatched"] ?? false;
                turn.generations = payload["generations"] ?? 0;
                turn.completed_at = payload["completed_at"] ?? null;
                turn.error = payload["error"] ?? null;
                break;
            }
        }
    }
    // -- optimistic overlay ---------------------------------------------------
    addPending(sender, text) {
        const localId = this.nextLocalId++;
        this.pending.push({ localId, sender, text });
        this.notify();
        return localId;
    }
    dropPending(localId) {
        this.pending = this.pending.filter((bubble) => bubble.localId !== localId);
        this.notify();
    }
    resolvePending(sender, text) {
        const index = this.pending.findIndex((bubble) => bubble.sender === sender && bubble.text === text);
        if (index >= 0)
            this.pending.splice(index, 1);
    }
    // -- derived views ----------------------------------------------------------
    /** Indices of the turns the NEXT message will see verbatim (last <= 2). */
    historyWindow() {
        if (!this.view)
            return [];
        const count = this.view.turns.length;
        const indices = [];
        for (let i = Math.max(0, count - 2); i < count; i++)
            indices.push(i);
        return indices;
    }
    summaryLength() {
        return this.view ? [...this.view.summary.text].length : 0;
    }
}
