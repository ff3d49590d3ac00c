import assert from "node:assert/strict";
import { test } from "node:test";

import { ConsoleStore } from "../src/state.js";
import type { SessionEvent, TurnPrompt } from "../src/types.js";

function prompt(source: string): TurnPrompt {
  return {
    system: "sys",
    instruction: "instr",
    source,
    direction: "ko-en",
    user_message: `instr\nSource: ${source}`,
  };
}

function created(seq = 1): SessionEvent {
  return {
    seq,
    kind: "created",
    payload: {
      session_id: "s1",
      customer_language: "ko",
      agent_language: "en",
      created_at: 0,
    },
  };
}

function posted(seq: number, turnIndex: number, text: string): SessionEvent {
  return {
    seq,
    kind: "message_posted",
    payload: {
      turn_index: turnIndex,
      sender: "customer",
      original: text,
      posted_at: seq,
      prompt: prompt(text),
    },
  };
}

function translated(seq: number, turnIndex: number, text: string): SessionEvent {
  return {
    seq,
    kind: "translated",
    payload: {
      turn_index: turnIndex,
      translation: text,
      status: "ok",
      language_guess: { label: "latin_english_like", hangul_ratio: 0, non_english_letter_ratio: 0 },
      mismatched: false,
      generations: 1,
      completed_at: seq,
    },
  };
}

test("applies events in order and exposes the view", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  store.applyEvent(posted(2, 0, "안녕하세요"));
  store.applyEvent(translated(3, 0, "hello"));
  assert.equal(store.view?.turns.length, 1);
  assert.equal(store.view?.turns[0].translation, "hello");
  assert.equal(store.view?.turns[0].status, "ok");
  assert.equal(store.lastSeq, 3);
});

test("buffers out-of-order events until the gap fills", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  store.applyEvent(translated(3, 0, "late"));
  assert.equal(store.view?.turns.length, 0); // seq 3 waits for seq 2
  store.applyEvent(posted(2, 0, "hi"));
  assert.equal(store.view?.turns.length, 1);
  assert.equal(store.view?.turns[0].translation, "late");
});

test("drops duplicate events from reconnect overlap", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  store.applyEvent(posted(2, 0, "hi"));
  store.applyEvent(posted(2, 0, "hi"));
  assert.equal(store.view?.turns.length, 1);
});

test("summary events update the panel and the counter stays within 200", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  store.applyEvent({
    seq: 2,
    kind: "summary_updated",
    payload: { text: "요약 ".repeat(10).trim(), covered_turns: 3 },
  });
  assert.equal(store.view?.summary.covered_turns, 3);
  assert.ok(store.summaryLength() <= 200);
});

test("optimistic bubbles dissolve on the matching posted event", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  store.addPending("customer", "hi");
  assert.equal(store.pending.length, 1);
  store.applyEvent(posted(2, 0, "hi"));
  assert.equal(store.pending.length, 0);
  assert.equal(store.view?.turns.length, 1);
});

test("history window is the last two turns", () => {
  const store = new ConsoleStore();
  store.applyEvent(created());
  assert.deepEqual(store.historyWindow(), []);
  let seq = 2;
  for (let i = 0; i < 4; i++) {
    store.applyEvent(posted(seq++, i, `m${i}`));
    store.applyEvent(translated(seq++, i, `t${i}`));
  }
  assert.deepEqual(store.historyWindow(), [2, 3]);
});

test("notifies subscribers once per applied batch", () => {
  const store = new ConsoleStore();
  let calls = 0;
  store.subscribe(() => calls++);
  store.applyEvent(created());
  store.applyEvent(translated(3, 0, "late")); // buffered: no notify
  const before = calls;
  store.applyEvent(posted(2, 0, "hi")); // applies 2 and drains 3
  assert.equal(calls, before + 1);
  assert.equal(store.lastSeq, 3);
});
