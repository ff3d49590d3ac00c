/** DOM rendering: two panes over one session, summary panel, inspector. */
import { historyLines, renderPrompt } from "./promptView.js";
import { SUMMARY_MAX_CHARS } from "./types.js";
function el(tag, className, text) {
    const node = document.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
export class ConsoleUI {
    store;
    api;
    sessionId;
    root;
    constructor(root, store, api, sessionId) {
        this.store = store;
        this.api = api;
        this.sessionId = sessionId;
        this.root = root;
        store.subscribe(() => this.render());
        this.render();
    }
    async send(sender, input) {
        const text = input.value.trim();
        if (!text)
            return;
        input.value = "";
        const localId = this.store.addPending(sender, text);
        try {
            await this.api.postMessage(this.sessionId, sender, text);
        }
        catch {
            this.store.dropPending(localId);
        }
    }
    bubble(turn, pane) {
        const mine = turn.sender === pane;
        const node = el("div", `bubble ${mine ? "mine" : "theirs"} status-${turn.status}`);
        node.append(el("div", "original", turn.original));
        if (turn.status === "pending") {
            node.append(el("div", "translation pending", "translating…"));
        }
        else if (turn.status === "failed") {
            const row = el("div", "translation failed", `failed: ${turn.error ?? "backend error"} `);
            const retry = el("button", "retry", "retry");
            retry.onclick = () => void this.api.retryTurn(this.sessionId, turn.turn_index);
            row.append(retry);
            node.append(row);
        }
        else {
            node.append(el("div", "translation", turn.translation ?? ""));
        }
        if (turn.mismatched) {
            node.append(el("span", "badge warn", "⚠ unexpected language"));
        }
        if (this.store.historyWindow().includes(turn.turn_index)) {
            node.classList.add("in-window");
        }
        const inspect = el("button", "inspect", "prompt");
        inspect.onclick = () => this.openInspector(turn);
        node.append(inspect);
        return node;
    }
    openInspector(turn) {
        const overlay = el("div", "overlay");
        const dialog = el("div", "inspector");
        const title = el("h3", undefined, `Prompt for turn ${turn.turn_index + 1}`);
        const toggleRow = el("label", "toggle-row", " context (history + summary)");
        const toggle = el("input");
        toggle.type = "checkbox";
        toggle.checked = true;
        toggleRow.prepend(toggle);
        const systemBlock = el("pre", "prompt-system");
        const historyBlock = el("pre", "prompt-history");
        const userBlock = el("pre", "prompt-user");
        const draw = () => {
            const view = renderPrompt(turn.prompt, toggle.checked);
            systemBlock.textContent = `system: ${view.system}`;
            const lines = toggle.checked ? historyLines(turn.prompt) : [];
            historyBlock.textContent = lines.length
                ? `history window:\n${lines.join("\n")}`
                : "history window: (empty)";
            userBlock.textContent = view.userMessage;
        };
        toggle.onchange = draw;
        draw();
        const close = el("button", "close", "close");
        close.onclick = () => overlay.remove();
        dialog.append(title, toggleRow, systemBlock, historyBlock, userBlock, close);
        overlay.append(dialog);
        this.root.append(overlay);
    }
    pane(sender, language) {
        const pane = el("section", `pane ${sender}`);
        pane.append(el("h2", undefined, `${sender} (${language})`));
        const scroll = el("div", "messages");
        for (const turn of this.store.view?.turns ?? []) {
            scroll.append(this.bubble(turn, sender));
        }
        for (const bubble of this.store.pending.filter((p) => p.sender === sender)) {
            const node = el("div", "bubble mine optimistic");
            node.append(el("div", "original", bubble.text));
            node.append(el("div", "translation pending", "sending…"));
            scroll.append(node);
        }
        const form = el("div", "composer");
        const input = el("input");
        input.type = "text";
        input.placeholder = `message as ${sender}…`;
        const send = el("button", "send", "send");
        const submit = () => void this.send(sender, input);
        send.onclick = submit;
        input.onkeydown = (event) => {
            if (event.key === "Enter")
                submit();
        };
        input.oninput = () => {
            send.disabled = input.value.trim() === "";
        };
        send.disabled = true;
        form.append(input, send);
        pane.append(scroll, form);
        return pane;
    }
    render() {
        this.root.querySelector(".console")?.remove();
        const frame = el("div", "console");
        const banner = el("div", `banner ${this.store.connection}`);
        banner.textContent =
            this.store.connection === "connected"
                ? `session ${this.sessionId}`
                : this.store.connection === "connecting"
                    ? "connecting…"
                    : "disconnected — retrying…";
        frame.append(banner);
        const view = this.store.view;
        const panes = el("div", "panes");
        panes.append(this.pane("customer", view?.customer_language ?? "…"), this.pane("agent", view?.agent_language ?? "…"));
        frame.append(panes);
        const side = el("aside", "context-panel");
        side.append(el("h2", undefined, "rolling summary"));
        const counter = el("div", "summary-counter");
        counter.textContent = `${this.store.summaryLength()}/${SUMMARY_MAX_CHARS}`;
        const summaryText = el("div", "summary-text", this.store.view?.summary.text || "(empty)");
        const covered = el("div", "summary-covered", `covers ${view?.summary.covered_turns ?? 0} turn(s); ` +
            `window: ${this.store.historyWindow().map((i) => i + 1).join(", ") || "none"}`);
        side.append(counter, summaryText, covered);
        frame.append(side);
        this.root.append(frame);
    }
}
