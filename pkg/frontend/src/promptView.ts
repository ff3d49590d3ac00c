/** What-if rendering for the per-turn prompt inspector.
 *
 * The service stores the exact prompt it sent (system, instruction, source,
 * full user message). With the context toggle off, the inspector shows the
 * same turn as the service would have built it without history or summary:
 * the "Dialogue Context:" line dropped from the instruction and the history
 * lines gone from the user message.
 */

import type { TurnPrompt } from "./types.js";

export interface PromptView {
  system: string;
  instruction: string;
  userMessage: string;
  contextOn: boolean;
}

export function stripDialogueContext(instruction: string): string {
  return instruction
    .split("\n")
    .filter((line) => !line.startsWith("Dialogue Context: "))
    .join("\n");
}

export function renderPrompt(prompt: TurnPrompt, contextOn: boolean): PromptView {
  if (contextOn) {
    return {
      system: prompt.system,
      instruction: prompt.instruction,
      userMessage: prompt.user_message,
      contextOn,
    };
  }
  const instruction = stripDialogueContext(prompt.instruction);
  return {
    system: prompt.system,
    instruction,
    userMessage: `${instruction}\nSource: ${prompt.source}`,
    contextOn,
  };
}

/** History lines of the stored user message: everything strictly between the
 * instruction block and the trailing "Source:" line. */
export function historyLines(prompt: TurnPrompt): string[] {
  const instructionLineCount = prompt.instruction.split("\n").length;
  const lines = prompt.user_message.split("\n");
  const body = lines.slice(instructionLineCount);
  const sourceAt = body.lastIndexOf(`Source: ${prompt.source}`);
  return sourceAt < 0 ? body : body.slice(0, sourceAt);
}
