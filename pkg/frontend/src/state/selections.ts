/** Selection sets: optimistic edits confirmed by server revision checks. */

import { GatewayError, type GatewayClient } from "../api/client.js";
import type { SelectionDoc, SelectionEntry } from "../api/types.js";
import { Observable } from "./observable.js";

export const MAX_RATING = 5;

export interface ConflictInfo {
  /** Revision this client mutated against. */
  expected: number;
  /** Revision the server was actually at. */
  current: number;
}

export class SelectionsStore extends Observable {
  private currentDoc: SelectionDoc | null = null;
  private names: string[] = [];
  private conflictInfo: ConflictInfo | null = null;
  private lastError: string | null = null;

  constructor(private readonly client: GatewayClient) {
    super();
  }

  /** Server-confirmed state of the open set (optimistic while in flight). */
  get doc(): SelectionDoc | null {
    return this.currentDoc;
  }

  get knownNames(): string[] {
    return this.names;
  }

  get conflict(): ConflictInfo | null {
    return this.conflictInfo;
  }

  get error(): string | null {
    return this.lastError;
  }

  clearConflict(): void {
    this.conflictInfo = null;
    this.emit();
  }

  async refreshNames(): Promise<string[]> {
    this.names = await this.client.listSelections();
    this.emit();
    return this.names;
  }

  /** Open (or implicitly create) a selection set by name. */
  async open(name: string): Promise<SelectionDoc> {
    const doc = await this.client.getSelection(name);
    this.currentDoc = doc;
    this.conflictInfo = null;
    this.lastError = null;
    this.emit();
    return doc;
  }

  /**
   * Rate/annotate a candidate in the open set.
   *
   * The entry is applied optimistically, then confirmed against the server;
   * on a revision conflict the set is reloaded and the conflict surfaced.
   * Ratings outside 0..5 are rejected client-side without a request.
   */
  async shortlist(candidateId: string, rating: number, note = ""): Promise<SelectionDoc> {
    if (!Number.isInteger(rating) || rating < 0 || rating > MAX_RATING) {
      throw new RangeError(`rating must be an integer in 0..${MAX_RATING}, got ${rating}`);
    }
    return this.mutate({ [candidateId]: { rating, note } }, []);
  }

  /** Remove a candidate from the open set. */
  async unshortlist(candidateId: string): Promise<SelectionDoc> {
    return this.mutate({}, [candidateId]);
  }

  private async mutate(
    set: Record<string, SelectionEntry>,
    remove: string[],
  ): Promise<SelectionDoc> {
    const base = this.currentDoc;
    if (!base) throw new Error("no selection set is open");

    // Optimistic view, pending the server's confirmation.
    const entries = { ...base.entries };
    for (const [id, entry] of Object.entries(set)) entries[id] = entry;
    for (const id of remove) delete entries[id];
    this.currentDoc = { ...base, entries };
    this.emit();

    try {
      const updated = await this.client.mutateSelection(base.name, base.revision, set, remove);
      this.currentDoc = updated; // shown state == server post-mutation state
      this.lastError = null;
      this.emit();
      return updated;
    } catch (error) {
      if (error instanceof GatewayError && error.code === "revision_conflict") {
        const fresh = await this.client.getSelection(base.name);
        this.currentDoc = fresh;
        this.conflictInfo = { expected: base.revision, current: fresh.revision };
      } else {
        this.currentDoc = base; // roll the optimistic edit back
        this.lastError = error instanceof Error ? error.message : String(error);
      }
      this.emit();
      throw error;
    }
  }

  /** Ids of the open set in the server's (sorted) order. */
  selectedIds(): string[] {
    return this.currentDoc ? Object.keys(this.currentDoc.entries) : [];
  }

  /** Export the open selection as a PNG contact sheet (server-side grid). */
  async exportSheet(columns: number): Promise<Uint8Array> {
    const ids = this.selectedIds();
    if (ids.length === 0) throw new Error("selection is empty; nothing to export");
    return this.client.exportSheet(ids, columns);
  }
}
