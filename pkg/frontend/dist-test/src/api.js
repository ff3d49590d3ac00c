/** Thin HTTP client for the documented session API. */
export class ApiError extends Error {
    status;
    constructor(status, detail) {
        super(`HTTP ${status}: ${detail}`);
        this.status = status;
    }
}
export class ApiClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl, fetchFn = fetch) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(method, path, body) {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, {
            method,
            headers: body === undefined ? {} : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await response.text();
        if (!response.ok) {
            throw new ApiError(response.status, text.slice(0, 300));
        }
        return JSON.parse(text);
    }
    createSession(customerLanguage, agentLanguage) {
        return this.request("POST", "/sessions", {
            customer_language: customerLanguage,
            agent_language: agentLanguage,
        });
    }
    getSession(sessionId) {
        return this.request("GET", `/sessions/${sessionId}`);
    }
    postMessage(sessionId, sender, text) {
        return this.request("POST", `/sessions/${sessionId}/messages`, { sender, text });
    }
    retryTurn(sessionId, turnIndex) {
        return this.request("POST", `/sessions/${sessionId}/turns/${turnIndex}/retry`);
    }
    eventsUrl(sessionId, after = 0) {
        return `${this.baseUrl}/sessions/${sessionId}/events?after=${after}`;
    }
}
