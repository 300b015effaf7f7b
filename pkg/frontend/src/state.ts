/** Validation-round bookkeeping on the client side.
 *
 * Each sampled event starts with the server's suggestions pre-accepted; the
 * reviewer toggles per-type decisions or adds missing types, then submits.
 * A submitted decision is immutable and cannot be submitted twice. */

import type { SampledEvent } from "./types.js";

export interface QueueEntry {
  event: SampledEvent;
  accepted: Set<string>;
  submitted: boolean;
}

export class ValidationQueue {
  private entries = new Map<string, QueueEntry>();

  enqueue(events: SampledEvent[]): void {
    for (const event of events) {
      if (this.entries.has(event.event_id)) continue;
      this.entries.set(event.event_id, {
        event,
        accepted: new Set(event.suggested),
        submitted: false,
      });
    }
  }

  ids(): string[] {
    return [...this.entries.keys()];
  }

  pendingIds(): string[] {
    return this.ids().filter((id) => !this.entry(id).submitted);
  }

  entry(eventId: string): QueueEntry {
    const entry = this.entries.get(eventId);
    if (!entry) throw new Error(`unknown event ${eventId}`);
    return entry;
  }

  /** Types shown for an event: the suggestions plus any manual additions. */
  visibleTypes(eventId: string): string[] {
    const entry = this.entry(eventId);
    return [...new Set([...entry.event.suggested, ...entry.accepted])].sort();
  }

  isAccepted(eventId: string, type: string): boolean {
    return this.entry(eventId).accepted.has(type);
  }

  toggle(eventId: string, type: string): void {
    const entry = this.entry(eventId);
    if (entry.submitted) throw new Error("decision already submitted");
    if (entry.accepted.has(type)) entry.accepted.delete(type);
    else entry.accepted.add(type);
  }

  addManualType(eventId: string, type: string): void {
    const entry = this.entry(eventId);
    if (entry.submitted) throw new Error("decision already submitted");
    if (!type.trim()) throw new Error("type name is empty");
    entry.accepted.add(type);
  }

  acceptedList(eventId: string): string[] {
    return [...this.entry(eventId).accepted].sort();
  }

  /** Locks the entry; returns the accepted set to send. Throws on resubmit,
   * which keeps duplicate feedback off the wire. */
  markSubmitted(eventId: string): string[] {
    const entry = this.entry(eventId);
    if (entry.submitted) throw new Error(`event ${eventId} already submitted`);
    entry.submitted = true;
    return this.acceptedList(eventId);
  }

  clearSubmitted(): void {
    for (const [id, entry] of [...this.entries.entries()]) {
      if (entry.submitted) this.entries.delete(id);
    }
  }
}
