import type { Store } from "./state.js";
import type { EngineEvent } from "./types.js";

export interface RouterDeps {
  store: Store;
  /** Reload project info from the engine. */
  refresh: () => Promise<void>;
  /** Mark the conversation transcript stale so it refetches. */
  invalidateTranscript: () => void;
}

/**
 * Map one engine event to client reactions. The engine is the only
 * source of truth, so every reaction is an invalidation or a refetch,
 * never a local mutation of scene data.
 */
export function routeEvent(event: EngineEvent, deps: RouterDeps): void {
  const { store, refresh, invalidateTranscript } = deps;
  switch (event.type) {
    case "generation-started":
      store.setGenerating(true);
      break;
    case "generation-complete":
      store.setGenerating(false);
      invalidateTranscript();
      store.clearSliders(); // central deltas can move element numbers too
      store.bumpPreview();
      void refresh();
      break;
    case "generation-failed": {
      store.setGenerating(false);
      invalidateTranscript();
      const error = event.payload.error as { code?: string; message?: string } | undefined;
      store.setError(error ? `${error.code}: ${error.message}` : "generation failed");
      break;
    }
    case "slider-applied": {
      const id = String(event.payload.id);
      const name = String(event.payload.name);
      const cached = store.state.sliderCache.get(id);
      const row = cached?.find((r) => r.name === name);
      if (row && row.value === event.payload.value) {
        break; // our own patch; the response handler already updated us
      }
      store.dropSliders(id);
      store.bumpPreview();
      break;
    }
    case "warning":
      store.setError(`warning: ${JSON.stringify(event.payload)}`);
      break;
    default:
      // element/proxy/framework changes all reduce to a project reload
      void refresh();
  }
}
