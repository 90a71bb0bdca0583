import type { EngineEvent } from "./types.js";

// Named server-sent event types the engine emits. EventSource only fires
// listeners that were registered by name, so the list must be explicit.
export const ENGINE_EVENT_TYPES = [
  "element-created",
  "element-deleted",
  "proxy-added",
  "proxy-deleted",
  "framework-selected",
  "generation-started",
  "generation-complete",
  "generation-failed",
  "slider-applied",
  "warning",
] as const;

export type EventHandler = (event: EngineEvent) => void;

/**
 * Subscribe to the engine event stream. EventSource reconnects on its own
 * after drops; the replay query parameter is left off so a reconnect only
 * sees new events instead of duplicating old ones.
 */
export function connectEvents(url: string, handler: EventHandler): EventSource {
  const source = new EventSource(url);
  for (const type of ENGINE_EVENT_TYPES) {
    source.addEventListener(type, (raw) => {
      const message = raw as MessageEvent<string>;
      let parsed: EngineEvent;
      try {
        parsed = JSON.parse(message.data) as EngineEvent;
      } catch {
        return; // a torn frame is dropped, the next one resyncs us
      }
      handler(parsed);
    });
  }
  return source;
}
