/** Wire types mirroring the session service's JSON payloads. */

export interface LanguageGuess {
  label: string;
  hangul_ratio: number;
  non_english_letter_ratio: number;
}

export interface TurnPrompt {
  system: string;
  instruction: string;
  source: string;
  direction: string;
  user_message: string;
}

export type TurnStatus = "pending" | "ok" | "failed";
export type Sender = "customer" | "agent";

export interface Turn {
  turn_index: number;
  sender: Sender;
  original: string;
  posted_at: number;
  prompt: TurnPrompt;
  translation: string | null;
  status: TurnStatus;
  language_guess: LanguageGuess | null;
  mismatched: boolean;
  generations: number;
  completed_at: number | null;
  error: string | null;
}

export interface SummaryInfo {
  text: string;
  covered_turns: number;
}

export interface SessionView {
  session_id: string;
  customer_language: string;
  agent_language: string;
  created_at: number;
  turns: Turn[];
  summary: SummaryInfo;
}

export type EventKind = "created" | "message_posted" | "summary_updated" | "translated";

export interface SessionEvent {
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export const SUMMARY_MAX_CHARS = 200;
