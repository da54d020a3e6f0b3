/**
 * Typed client for the run server's JSON API.
 *
 * The fetch implementation is injected so tests can run against a fake;
 * the browser entry point passes the real one. Every error response is
 * surfaced as an ApiError carrying the server's error code, so callers
 * can distinguish a stale-revision conflict (409) from anything else.
 */
import type {
  CooccurBaseline,
  CooccurResponse,
  CrossfieldResponse,
  FieldsResponse,
  Gender,
  KwicResponse,
  RevisionReply,
  RunInfo,
  TermsResponse,
  ThemesSnapshot,
  ValidateResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly currentRevision?: number,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isStaleRevision(): boolean {
    return this.status === 409 && this.code === "stale-revision";
  }
}

export interface KwicParams {
  term: string;
  n?: number;
  seed?: number;
  scope?: string;
  gender?: Gender;
}

export interface CooccurParams {
  term: string;
  baseline?: CooccurBaseline;
  gender?: Gender;
  limit?: number;
}

const query = (params: Record<string, string | number | undefined>): string => {
  const qs = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) qs.set(key, String(value));
  }
  const text = qs.toString();
  return text ? `?${text}` : "";
};

export class Api {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `${response.status} ${response.statusText}`;
      let currentRevision: number | undefined;
      try {
        const payload = (await response.json()) as { error?: { code?: string; message?: string; current_revision?: number } };
        if (payload.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
          currentRevision = payload.error.current_revision;
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, code, message, currentRevision);
    }
    return (await response.json()) as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  // -- read endpoints --------------------------------------------------------

  run(): Promise<RunInfo> {
    return this.get("/api/run");
  }

  fields(): Promise<FieldsResponse> {
    return this.get("/api/fields");
  }

  terms(scope: string, gender: Gender): Promise<TermsResponse> {
    return this.get(`/api/terms${query({ scope, gender })}`);
  }

  crossfield(gender: Gender): Promise<CrossfieldResponse> {
    return this.get(`/api/terms/crossfield${query({ gender })}`);
  }

  kwic(params: KwicParams): Promise<KwicResponse> {
    return this.get(`/api/kwic${query({ ...params })}`);
  }

  cooccur(params: CooccurParams): Promise<CooccurResponse> {
    return this.get(`/api/cooccur${query({ ...params })}`);
  }

  // -- theme ledger -----------------------------------------------------------

  themes(): Promise<ThemesSnapshot> {
    return this.get("/api/themes");
  }

  validateThemes(): Promise<ValidateResponse> {
    return this.get("/api/themes/validate");
  }

  createTheme(revision: number, name: string, gender: Gender, notes = ""): Promise<RevisionReply> {
    return this.request("POST", "/api/themes", { revision, name, gender, notes });
  }

  assignTerm(revision: number, term: string, theme: string, gender: Gender, direct: boolean): Promise<RevisionReply> {
    return this.request("POST", "/api/themes/assign", { revision, term, theme, gender, direct });
  }

  renameTheme(revision: number, name: string, rename: string): Promise<RevisionReply> {
    return this.request("PUT", `/api/themes/${encodeURIComponent(name)}`, { revision, rename });
  }

  setThemeNotes(revision: number, name: string, notes: string): Promise<RevisionReply> {
    return this.request("PUT", `/api/themes/${encodeURIComponent(name)}`, { revision, notes });
  }

  deleteTheme(revision: number, name: string): Promise<RevisionReply> {
    return this.request("DELETE", `/api/themes/${encodeURIComponent(name)}${query({ revision })}`);
  }

  removeTerm(revision: number, theme: string, term: string): Promise<RevisionReply> {
    return this.request(
      "DELETE",
      `/api/themes/${encodeURIComponent(theme)}/terms/${encodeURIComponent(term)}${query({ revision })}`,
    );
  }
}
