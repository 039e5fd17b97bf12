/** Wire-level shapes of the gateway HTTP API plus the UI's domain types. */

export type PreviewMode = "linear" | "spherical";

export interface HealthInfo {
  status: string;
  candidates: number;
  generation_enabled: boolean;
}

export interface CandidateSummary {
  id: string;
  index: number;
  seed: number | null;
  created_at: string;
  lr_url: string;
  sr_url: string;
}

export interface CandidateDetail extends CandidateSummary {
  latent: number[];
  lr_sha256: string;
  sr_sha256: string;
  gen_checkpoint_hash: string;
  sr_checkpoint_hash: string;
}

export interface CandidatePage {
  total: number;
  offset: number;
  limit: number;
  items: CandidateSummary[];
}

export interface PreviewFrame {
  index: number;
  latent: number[];
  lr_url: string;
  sr_url: string;
}

export interface PreviewSet {
  token: string;
  items: PreviewFrame[];
}

export interface SelectionEntry {
  rating: number;
  note: string;
}

export interface SelectionDoc {
  name: string;
  revision: number;
  entries: Record<string, SelectionEntry>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  [key: string]: unknown;
}

// ---------------------------------------------------------------- domain

/** One candidate thumbnail; maps 1:1 to an API record on the current page. */
export interface Thumbnail {
  id: string;
  index: number;
  seed: number | null;
  createdAt: string;
  lrUrl: string;
  srUrl: string;
}

/** A rendered gallery page plus its paging position. */
export interface GalleryView {
  offset: number;
  limit: number;
  total: number;
  thumbnails: Thumbnail[];
  activeSelection: string | null;
  pageIndex: number;
  pageCount: number;
  empty: boolean;
}

/** One filmstrip frame; `failed` marks frames whose image did not render. */
export interface PathFrame {
  index: number;
  latent: number[];
  lrUrl: string;
  srUrl: string;
  failed: boolean;
}

/** An interpolation filmstrip between two stored candidates. */
export interface ExplorationPath {
  fromId: string;
  toId: string;
  steps: number;
  mode: PreviewMode;
  token: string;
  frames: PathFrame[];
}

/** Variations sampled around one stored candidate. */
export interface NeighborhoodView {
  centerId: string;
  radius: number;
  count: number;
  seed: number;
  token: string;
  frames: PathFrame[];
}
