/** Incremental server-sent-events reader over a fetch stream.
 *
 * Works in browsers and Node alike (no EventSource dependency) and survives
 * chunk boundaries landing mid-line or mid-field.
 */
export class SseParser {
    buffer = "";
    id = null;
    event = "";
    data = [];
    /** Feed one chunk of text; returns any messages completed by it. */
    push(chunk) {
        this.buffer += chunk;
        const out = [];
        let newline;
        while ((newline = this.buffer.indexOf("\n")) >= 0) {
            const line = this.buffer.slice(0, newline).replace(/\r$/, "");
            this.buffer = this.buffer.slice(newline + 1);
            if (line === "") {
                if (this.data.length > 0 || this.event !== "") {
                    out.push({ id: this.id, event: this.event || "message", data: this.data.join("\n") });
                }
                this.event = "";
                this.data = [];
                continue;
            }
            if (line.startsWith(":"))
                continue; // comment / keep-alive
            const colon = line.indexOf(":");
            const field = colon < 0 ? line : line.slice(0, colon);
            let value = colon < 0 ? "" : line.slice(colon + 1);
            if (value.startsWith(" "))
                value = value.slice(1);
            if (field === "id")
                this.id = Number(value);
            else if (field === "event")
                this.event = value;
            else if (field === "data")
                this.data.push(value);
        }
        return out;
    }
}
/** Stream messages from an SSE endpoint, reconnecting on failure until the
 * signal aborts. */
export async function subscribeEvents(url, onMessage, options = {}) {
    const fetchFn = options.fetchFn ?? fetch;
    const retryDelay = options.retryDelayMs ?? 1000;
    while (!options.signal?.aborted) {
        try {
            const response = await fetchFn(url(), {
                headers: { Accept: "text/event-stream" },
                signal: options.signal,
            });
            if (!response.ok || response.body === null) {
                throw new Error(`stream rejected: ${response.status}`);
            }
            options.onStatus?.(true);
            const reader = response.body.getReader();
            const decoder = new TextDecoder();
            const parser = new SseParser();
            for (;;) {
                const { done, value } = await reader.read();
                if (done)
                    break;
                for (const message of parser.push(decoder.decode(value, { stream: true }))) {
                    onMessage(message);
                }
            }
        }
        catch (error) {
            if (options.signal?.aborted)
                return;
        }
        options.onStatus?.(false);
        if (options.signal?.aborted)
            return;
        await new Promise((resolve) => setTimeout(resolve, retryDelay));
    }
}
