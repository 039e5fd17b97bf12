/** Gallery browsing: one page of candidates at a time, never fabricated. */

import type { GatewayClient } from "../api/client.js";
import type { CandidateSummary, GalleryView, Thumbnail } from "../api/types.js";
import { Observable } from "./observable.js";

export const DEFAULT_PAGE_SIZE = 16;

function toThumbnail(record: CandidateSummary): Thumbnail {
  return {
    id: record.id,
    index: record.index,
    seed: record.seed,
    createdAt: record.created_at,
    lrUrl: record.lr_url,
    srUrl: record.sr_url,
  };
}

export class GalleryStore extends Observable {
  private current: GalleryView | null = null;
  private lastError: string | null = null;
  private staleFlag = false;
  private loadingFlag = false;
  private activeSelectionName: string | null = null;

  constructor(
    private readonly client: GatewayClient,
    readonly pageSize: number = DEFAULT_PAGE_SIZE,
  ) {
    super();
  }

  /** The last successfully loaded page, if any. */
  get view(): GalleryView | null {
    return this.current;
  }

  get error(): string | null {
    return this.lastError;
  }

  /** True when `view` predates a failed refresh — old data, not fresh. */
  get stale(): boolean {
    return this.staleFlag;
  }

  get loading(): boolean {
    return this.loadingFlag;
  }

  get activeSelection(): string | null {
    return this.activeSelectionName;
  }

  setActiveSelection(name: string | null): void {
    this.activeSelectionName = name;
    if (this.current) this.current = { ...this.current, activeSelection: name };
    this.emit();
  }

  /** Load one page; thumbnails map 1:1, in order, to the API records. */
  async browse(offset = 0, limit = this.pageSize): Promise<GalleryView> {
    this.loadingFlag = true;
    this.emit();
    try {
      const page = await this.client.listCandidates(offset, limit);
      const view: GalleryView = {
        offset: page.offset,
        limit: page.limit,
        total: page.total,
        thumbnails: page.items.map(toThumbnail),
        activeSelection: this.activeSelectionName,
        pageIndex: page.limit > 0 ? Math.floor(page.offset / page.limit) : 0,
        pageCount: page.limit > 0 ? Math.ceil(page.total / page.limit) : page.total > 0 ? 1 : 0,
        empty: page.total === 0,
      };
      this.current = view;
      this.lastError = null;
      this.staleFlag = false;
      return view;
    } catch (error) {
      // Keep the previous page visible but flagged stale, never as fresh.
      this.lastError = error instanceof Error ? error.message : String(error);
      this.staleFlag = this.current !== null;
      throw error;
    } finally {
      this.loadingFlag = false;
      this.emit();
    }
  }

  async next(): Promise<GalleryView | null> {
    if (!this.current) return this.browse(0, this.pageSize);
    const { offset, limit, total } = this.current;
    if (offset + limit >= total) return this.current;
    return this.browse(offset + limit, limit);
  }

  async prev(): Promise<GalleryView | null> {
    if (!this.current) return this.browse(0, this.pageSize);
    const { offset, limit } = this.current;
    if (offset === 0) return this.current;
    return this.browse(Math.max(0, offset - limit), limit);
  }
}
