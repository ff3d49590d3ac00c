/** Bootstrap: create or join a session, subscribe to its event stream, and
 * mount the two-pane console. Session and API base come from the URL:
 * ?api=http://host:port (default: same origin) and ?session=<id>. */
import { ApiClient } from "./api.js";
import { ConsoleStore } from "./state.js";
import { subscribeEvents } from "./sse.js";
import { ConsoleUI } from "./ui.js";
async function boot() {
    const params = new URLSearchParams(window.location.search);
    const api = new ApiClient(params.get("api") ?? "");
    let sessionId = params.get("session");
    if (!sessionId) {
        const created = await api.createSession(params.get("customer") ?? "ko", params.get("agent") ?? "en");
        sessionId = created.session_id;
        params.set("session", sessionId);
        history.replaceState(null, "", `?${params.toString()}`);
    }
    const store = new ConsoleStore();
    const root = document.getElementById("app");
    if (!root)
        throw new Error("missing #app element");
    new ConsoleUI(root, store, api, sessionId);
    void subscribeEvents(() => api.eventsUrl(sessionId, store.lastSeq), (message) => {
        store.applyEvent({
            seq: message.id ?? 0,
            kind: message.event,
            payload: JSON.parse(message.data),
        });
    }, { onStatus: (connected) => store.setConnection(connected ? "connected" : "disconnected") });
}
void boot();
