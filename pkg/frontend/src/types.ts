/**
 * Response shapes of the run server's JSON API.
 *
 * These mirror docs/api_schema.json in the repository root. Numbers that
 * the reports encode as JSON null (infinite ratios, unrepresentable
 * values) are typed `number | null`; null ratios mean the other gender
 * never uses the term.
 */

export type Gender = "F" | "M";

export interface RunInfo {
  run_id: string;
  meta: {
    run_id: string;
    config: Record<string, unknown>;
    kept_fields: string[];
    field_names: Record<string, [string, string]>;
    overall_fm: number | null;
    overlap: number;
  };
}

export interface NarrowField {
  code: string;
  name: string;
  broad: string;
  f_count: number;
  m_count: number;
  ratio: number | null;
  display: string;
}

export interface BroadField {
  name: string;
  f_count: number;
  m_count: number;
  ratio: number | null;
  display: string;
  most_female: NarrowField | null;
  most_male: NarrowField | null;
}

export interface FieldsResponse {
  broad: BroadField[];
  narrow: NarrowField[];
  factors: {
    male_multiplier: number;
    female_multiplier: number;
  };
}

export interface TermEntry {
  rank: number;
  term: string;
  gender_count: number;
  other_count: number;
  gender_share: number;
  other_share: number;
  term_ratio: number | null;
  ratio_display: string;
  chi2: number;
  p_value: number;
  correction_applied: boolean;
  author_ratio?: number | null;
  fdr_selected?: boolean;
  crossfield_total?: number;
}

export interface TermsResponse {
  scope: string;
  gender: Gender;
  ordered_by: string;
  overall_fm?: number | null;
  field_name?: string;
  broad_name?: string;
  fdr?: {
    alpha: number;
    selected: number;
    min_selected_chi2: number | null;
    reference_min_chi2: number | null;
  };
  entries: TermEntry[];
}

export interface CrossfieldRow {
  term: string;
  total_fields: number;
  f_fields: number;
  m_fields: number;
  majority_share: number;
  per_term_tail: number | null;
}

export interface CrossfieldResponse {
  gender: Gender;
  min_fields: number;
  min_share: number;
  top_k: number;
  n_fields: number;
  rows: CrossfieldRow[];
  significance: Record<string, unknown>;
}

export interface KwicSample {
  article_id: string;
  gender: Gender;
  fields: string[];
  window: string;
  offsets: [number, number][];
}

export interface KwicResponse {
  term: string;
  total_matches: number;
  samples: KwicSample[];
}

export type CooccurBaseline = "all" | "same-gender";

export interface CooccurEntry {
  term: string;
  chi2: number;
  p_value: number;
  with_anchor: number;
  without_anchor: number;
  share_with: number;
  share_without: number;
}

export interface CooccurResponse {
  anchor: string;
  baseline: CooccurBaseline;
  gender: Gender | null;
  anchor_docs: number;
  other_docs: number;
  entries: CooccurEntry[];
}

export interface Theme {
  name: string;
  gender: Gender;
  terms: string[];
  indirect_terms: string[];
  notes: string;
  created: string;
  modified: string;
}

export interface ThemesSnapshot {
  format: string;
  version: number;
  run_id: string;
  revision: number;
  themes: Theme[];
}

export interface RevisionReply {
  revision: number;
}

export interface LedgerFinding {
  kind: "stale-term" | "duplicate-direct" | "empty-theme";
  message: string;
  theme: string;
  term: string | null;
}

export interface ValidateResponse {
  revision: number;
  findings: LedgerFinding[];
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    current_revision?: number;
  };
}
