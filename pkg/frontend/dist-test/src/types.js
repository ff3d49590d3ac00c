/** Wire types mirroring the session service's JSON payloads. */
export const SUMMARY_MAX_CHARS = 200;
