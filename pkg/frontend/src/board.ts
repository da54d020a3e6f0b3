/**
 * Theme board model and optimistic ledger synchronisation.
 *
 * The board is a pure projection of the server's ledger snapshot:
 * columns are themes, cards are term memberships (direct or indirect).
 * Mutations are applied optimistically for instant feedback, then the
 * authoritative snapshot is refetched; a 409 stale-revision reply rolls
 * the board back and raises a conflict prompt instead of overwriting
 * anyone else's work.
 */
import type { Api } from "./api.js";
import { ApiError } from "./api.js";
import type { Gender, ThemesSnapshot } from "./types.js";

export interface BoardCard {
  term: string;
  indirect: boolean;
}

export interface BoardColumn {
  name: string;
  gender: Gender;
  notes: string;
  cards: BoardCard[];
}

export interface BoardState {
  revision: number;
  columns: BoardColumn[];
}

export const boardFromSnapshot = (snapshot: ThemesSnapshot): BoardState => ({
  revision: snapshot.revision,
  columns: snapshot.themes.map((theme) => ({
    name: theme.name,
    gender: theme.gender,
    notes: theme.notes,
    cards: [
      ...theme.terms.map((term) => ({ term, indirect: false })),
      ...theme.indirect_terms.map((term) => ({ term, indirect: true })),
    ],
  })),
});

/** Indirect members print bracketed when the bracket toggle is on. */
export const cardLabel = (term: string, indirect: boolean, brackets: boolean): string =>
  indirect && brackets ? `[${term}]` : term;

/** Inline validation for the new-theme form; null means acceptable. */
export const validateThemeName = (state: BoardState, name: string): string | null => {
  const trimmed = name.trim();
  if (!trimmed) return "theme name required";
  if (state.columns.some((c) => c.name === trimmed)) {
    return `a theme named "${trimmed}" already exists`;
  }
  return null;
};

export type Mutation =
  | { kind: "create"; name: string; gender: Gender; notes: string }
  | { kind: "assign"; term: string; theme: string; gender: Gender; direct: boolean }
  | { kind: "remove"; theme: string; term: string }
  | { kind: "rename"; theme: string; rename: string }
  | { kind: "notes"; theme: string; notes: string }
  | { kind: "delete"; theme: string };

const withColumn = (
  state: BoardState,
  name: string,
  update: (column: BoardColumn) => BoardColumn,
): BoardState => ({
  revision: state.revision,
  columns: state.columns.map((c) => (c.name === name ? update(c) : c)),
});

/**
 * Apply a mutation locally, mirroring the ledger's own rules: direct
 * membership is exclusive within a gender, so a direct assign removes
 * the term from every other same-gender column and from the target's
 * indirect list. The result is only a preview; the snapshot refetched
 * after a successful commit is authoritative.
 */
export const applyMutation = (state: BoardState, mutation: Mutation): BoardState => {
  switch (mutation.kind) {
    case "create":
      return {
        revision: state.revision,
        columns: [
          ...state.columns,
          { name: mutation.name, gender: mutation.gender, notes: mutation.notes, cards: [] },
        ],
      };
    case "assign": {
      const { term, theme, gender, direct } = mutation;
      const columns = state.columns.map((column) => {
        if (column.name === theme) {
          const rest = column.cards.filter((card) => card.term !== term);
          return { ...column, cards: [...rest, { term, indirect: !direct }] };
        }
        if (direct && column.gender === gender) {
          return {
            ...column,
            cards: column.cards.filter((card) => card.indirect || card.term !== term),
          };
        }
        return column;
      });
      if (!columns.some((c) => c.name === theme)) {
        columns.push({ name: theme, gender, notes: "", cards: [{ term, indirect: !direct }] });
      }
      return { revision: state.revision, columns };
    }
    case "remove":
      return withColumn(state, mutation.theme, (column) => ({
        ...column,
        cards: column.cards.filter((card) => card.term !== mutation.term),
      }));
    case "rename":
      return withColumn(state, mutation.theme, (column) => ({
        ...column,
        name: mutation.rename,
      }));
    case "notes":
      return withColumn(state, mutation.theme, (column) => ({
        ...column,
        notes: mutation.notes,
      }));
    case "delete":
      return {
        revision: state.revision,
        columns: state.columns.filter((c) => c.name !== mutation.theme),
      };
  }
};

export interface LedgerSyncHooks {
  /** Re-render with the given state (optimistic, rolled back, or synced). */
  onState: (state: BoardState) => void;
  /** A write lost the race; the ledger is at `currentRevision`. */
  onConflict: (currentRevision: number | undefined) => void;
  /** Any other request failure (network, validation). */
  onError: (error: Error) => void;
}

export class LedgerSync {
  state: BoardState = { revision: 0, columns: [] };
  private chain: Promise<void> = Promise.resolve();

  constructor(
    private readonly api: Api,
    private readonly hooks: LedgerSyncHooks,
  ) {}

  async load(): Promise<void> {
    const snapshot = await this.api.themes();
    this.state = boardFromSnapshot(snapshot);
    this.hooks.onState(this.state);
  }

  /**
   * Queue a mutation: apply it optimistically, send it with the current
   * revision, then reconcile from the authoritative snapshot. Commits
   * are serialised so each carries the revision its predecessor earned.
   */
  commit(mutation: Mutation): Promise<boolean> {
    const run = this.chain.then(() => this.push(mutation));
    this.chain = run.then(() => undefined, () => undefined);
    return run;
  }

  private async push(mutation: Mutation): Promise<boolean> {
    const before = this.state;
    this.state = applyMutation(before, mutation);
    this.hooks.onState(this.state);
    try {
      await this.send(mutation, before.revision);
      await this.load();
      return true;
    } catch (error) {
      this.state = before;
      this.hooks.onState(before);
      if (error instanceof ApiError && error.isStaleRevision) {
        this.hooks.onConflict(error.currentRevision);
      } else {
        this.hooks.onError(error instanceof Error ? error : new Error(String(error)));
      }
      return false;
    }
  }

  private send(mutation: Mutation, revision: number): Promise<unknown> {
    switch (mutation.kind) {
      case "create":
        return this.api.createTheme(revision, mutation.name, mutation.gender, mutation.notes);
      case "assign":
        return this.api.assignTerm(revision, mutation.term, mutation.theme, mutation.gender, mutation.direct);
      case "remove":
        return this.api.removeTerm(revision, mutation.theme, mutation.term);
      case "rename":
        return this.api.renameTheme(revision, mutation.theme, mutation.rename);
      case "notes":
        return this.api.setThemeNotes(revision, mutation.theme, mutation.notes);
      case "delete":
        return this.api.deleteTheme(revision, mutation.theme);
    }
  }
}
