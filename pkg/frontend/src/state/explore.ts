/** Latent-space exploration: filmstrips, neighborhoods, and promotion. */

import type { GatewayClient } from "../api/client.js";
import type {
  CandidateDetail,
  ExplorationPath,
  NeighborhoodView,
  PathFrame,
  PreviewFrame,
  PreviewMode,
} from "../api/types.js";
import { Observable } from "./observable.js";

function toFrame(item: PreviewFrame): PathFrame {
  return {
    index: item.index,
    latent: item.latent,
    lrUrl: item.lr_url,
    srUrl: item.sr_url,
    failed: false,
  };
}

export class ExploreStore extends Observable {
  private currentPath: ExplorationPath | null = null;
  private currentNeighborhood: NeighborhoodView | null = null;
  private lastPromotedDetail: CandidateDetail | null = null;
  private lastError: string | null = null;

  constructor(private readonly client: GatewayClient) {
    super();
  }

  get path(): ExplorationPath | null {
    return this.currentPath;
  }

  get neighborhood(): NeighborhoodView | null {
    return this.currentNeighborhood;
  }

  get lastPromoted(): CandidateDetail | null {
    return this.lastPromotedDetail;
  }

  get error(): string | null {
    return this.lastError;
  }

  /** Interpolate between two stored candidates; frames arrive in order. */
  async explore(
    fromId: string,
    toId: string,
    steps: number,
    mode: PreviewMode,
  ): Promise<ExplorationPath> {
    try {
      const preview = await this.client.interpolate(fromId, toId, steps, mode);
      this.currentPath = {
        fromId,
        toId,
        steps,
        mode,
        token: preview.token,
        frames: preview.items.map(toFrame),
      };
      this.lastError = null;
      this.emit();
      return this.currentPath;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.emit();
      throw error;
    }
  }

  /** Sample variations around one stored candidate. */
  async exploreNeighborhood(
    id: string,
    radius: number,
    count: number,
    seed = 0,
  ): Promise<NeighborhoodView> {
    try {
      const preview = await this.client.neighborhood(id, radius, count, seed);
      this.currentNeighborhood = {
        centerId: id,
        radius,
        count,
        seed,
        token: preview.token,
        frames: preview.items.map(toFrame),
      };
      this.lastError = null;
      this.emit();
      return this.currentNeighborhood;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.emit();
      throw error;
    }
  }

  /** Mark a frame whose image failed to render, so views show a placeholder. */
  markFrameFailed(frame: PathFrame): void {
    frame.failed = true;
    this.emit();
  }

  /** Promote a previewed frame into the catalog as a first-class candidate. */
  async promote(frame: PathFrame): Promise<CandidateDetail> {
    const detail = await this.client.promote(frame.latent);
    this.lastPromotedDetail = detail;
    this.emit();
    return detail;
  }
}
