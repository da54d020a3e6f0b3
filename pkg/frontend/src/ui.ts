/**
 * DOM wiring for the workbench page.
 *
 * Keeps no domain logic of its own: reads come through the Api client,
 * board mutations go through LedgerSync, and all HTML fragments come
 * from the render module. Event handlers are delegated from the static
 * containers in index.html.
 */
import { Api, ApiError } from "./api.js";
import { LedgerSync, validateThemeName } from "./board.js";
import type { BoardState, Mutation } from "./board.js";
import {
  boardHtml,
  cooccurPanelHtml,
  esc,
  findingsHtml,
  kwicPanelHtml,
  termListCaption,
  termTableHtml,
} from "./render.js";
import { filterEntries, sortEntries } from "./termlist.js";
import type { SortKey } from "./termlist.js";
import type { CooccurBaseline, Gender, RunInfo, TermsResponse } from "./types.js";

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in page shell`);
  return node as T;
};

export class Workbench {
  private gender: Gender = "F";
  private sortKey: SortKey = "rank";
  private filter = "";
  private selectedTerm: string | null = null;
  private brackets = true;
  private baseline: CooccurBaseline = "all";
  private kwicScope = "all";
  private kwicSeed = 0;
  private terms: TermsResponse | null = null;
  private fieldNames: Record<string, [string, string]> = {};
  private keptFields: string[] = [];
  private readonly sync: LedgerSync;

  constructor(private readonly api: Api) {
    this.sync = new LedgerSync(api, {
      onState: (state) => this.renderBoard(state),
      onConflict: (current) => this.showConflict(current),
      onError: (error) => this.showError(error.message),
    });
  }

  async boot(): Promise<void> {
    this.wireEvents();
    await this.withBanner(async () => {
      const run = await this.api.run();
      this.fieldNames = run.meta.field_names;
      this.keptFields = run.meta.kept_fields;
      this.renderHeader(run);
      this.fillScopeSelect();
      await this.loadTerms();
      await this.sync.load();
    }, () => this.boot());
  }

  // -- loading ----------------------------------------------------------------

  private async withBanner(work: () => Promise<void>, retry: () => void): Promise<void> {
    try {
      this.hideBanner();
      await work();
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      this.showError(message, retry);
    }
  }

  private async loadTerms(): Promise<void> {
    this.terms = await this.api.terms("overall", this.gender);
    this.renderTerms();
  }

  private async loadPanels(): Promise<void> {
    if (!this.selectedTerm) return;
    const term = this.selectedTerm;
    const [kwic, cooccur] = await Promise.all([
      this.api.kwic({ term, n: 30, seed: this.kwicSeed, scope: this.kwicScope, gender: this.gender }),
      this.api.cooccur({ term, baseline: this.baseline, gender: this.gender }),
    ]);
    el("kwic-panel").innerHTML = kwicPanelHtml(kwic, this.fieldNames);
    el("cooccur-panel").innerHTML = cooccurPanelHtml(cooccur);
  }

  // -- rendering --------------------------------------------------------------

  private renderHeader(run: RunInfo): void {
    const fm = run.meta.overall_fm;
    el("run-info").textContent =
      `run ${run.run_id} · ${run.meta.kept_fields.length} fields` +
      (fm === null ? "" : ` · overall F/M ${fm.toFixed(2)}`);
  }

  private fillScopeSelect(): void {
    const select = el<HTMLSelectElement>("kwic-scope");
    select.innerHTML =
      '<option value="all">all fields</option>' +
      this.keptFields
        .map((code) => {
          const label = this.fieldNames[code]?.[0] ?? code;
          return `<option value="${esc(code)}">${esc(label)}</option>`;
        })
        .join("");
  }

  private renderTerms(): void {
    if (!this.terms) return;
    const visible = sortEntries(filterEntries(this.terms.entries, this.filter), this.sortKey);
    el("term-rows").innerHTML = termTableHtml(visible, this.selectedTerm);
    el("term-caption").textContent = "";
    el("term-caption").innerHTML = termListCaption(this.terms);
  }

  private renderBoard(state: BoardState): void {
    el("board").innerHTML = boardHtml(state, this.brackets);
    el("board-revision").textContent = `revision ${state.revision}`;
  }

  // -- banners ------------------------------------------------------------------

  private showError(message: string, retry?: () => void): void {
    const banner = el("banner");
    banner.className = "banner error";
    banner.innerHTML =
      `<span>${esc(message)}</span>` + (retry ? '<button id="banner-retry">retry</button>' : "") +
      '<button id="banner-dismiss">dismiss</button>';
    banner.hidden = false;
    if (retry) el("banner-retry").onclick = () => retry();
    el("banner-dismiss").onclick = () => this.hideBanner();
  }

  private showConflict(current: number | undefined): void {
    const banner = el("banner");
    banner.className = "banner conflict";
    banner.innerHTML =
      `<span>the ledger changed elsewhere${current === undefined ? "" : ` (now at revision ${current})`}; ` +
      "your last change was rolled back</span>" +
      '<button id="banner-reload">reload board</button>';
    banner.hidden = false;
    el("banner-reload").onclick = () => {
      this.hideBanner();
      void this.withBanner(() => this.sync.load(), () => this.showConflict(current));
    };
  }

  private hideBanner(): void {
    el("banner").hidden = true;
  }

  // -- events -------------------------------------------------------------------

  private commit(mutation: Mutation): void {
    void this.sync.commit(mutation);
  }

  private wireEvents(): void {
    for (const gender of ["F", "M"] as const) {
      el(`tab-${gender.toLowerCase()}`).onclick = () => {
        this.gender = gender;
        el("tab-f").classList.toggle("active", gender === "F");
        el("tab-m").classList.toggle("active", gender === "M");
        this.selectedTerm = null;
        el("kwic-panel").innerHTML = "";
        el("cooccur-panel").innerHTML = "";
        void this.withBanner(() => this.loadTerms(), () => void this.loadTerms());
      };
    }

    el<HTMLInputElement>("term-filter").oninput = (event) => {
      this.filter = (event.target as HTMLInputElement).value;
      this.renderTerms();
    };
    el<HTMLSelectElement>("term-sort").onchange = (event) => {
      this.sortKey = (event.target as HTMLSelectElement).value as SortKey;
      this.renderTerms();
    };

    const rows = el("term-rows");
    rows.addEventListener("click", (event) => {
      const row = (event.target as HTMLElement).closest<HTMLElement>("tr[data-term]");
      if (!row?.dataset.term) return;
      this.selectedTerm = row.dataset.term;
      this.renderTerms();
      void this.withBanner(() => this.loadPanels(), () => void this.loadPanels());
    });
    rows.addEventListener("dragstart", (event) => {
      const row = (event.target as HTMLElement).closest<HTMLElement>("tr[data-term]");
      if (!row?.dataset.term || !(event instanceof DragEvent) || !event.dataTransfer) return;
      event.dataTransfer.setData("application/x-term", row.dataset.term);
      event.dataTransfer.setData("application/x-gender", this.gender);
    });

    el<HTMLSelectElement>("kwic-scope").onchange = (event) => {
      this.kwicScope = (event.target as HTMLSelectElement).value;
      void this.withBanner(() => this.loadPanels(), () => void this.loadPanels());
    };
    el<HTMLInputElement>("kwic-seed").onchange = (event) => {
      this.kwicSeed = Number((event.target as HTMLInputElement).value) || 0;
      void this.withBanner(() => this.loadPanels(), () => void this.loadPanels());
    };
    el("cooccur-baselines").onchange = () => {
      const checked = document.querySelector<HTMLInputElement>('input[name="baseline"]:checked');
      this.baseline = (checked?.value as CooccurBaseline) ?? "all";
      void this.withBanner(() => this.loadPanels(), () => void this.loadPanels());
    };

    this.wireBoardEvents();
    this.wireThemeForm();
  }

  private wireBoardEvents(): void {
    const board = el("board");

    board.addEventListener("dragstart", (event) => {
      const card = (event.target as HTMLElement).closest<HTMLElement>(".card");
      if (!card?.dataset.term || !(event instanceof DragEvent) || !event.dataTransfer) return;
      event.dataTransfer.setData("application/x-term", card.dataset.term);
      const column = card.closest<HTMLElement>(".column");
      if (column?.dataset.gender) {
        event.dataTransfer.setData("application/x-gender", column.dataset.gender);
      }
    });
    board.addEventListener("dragover", (event) => {
      const column = (event.target as HTMLElement).closest<HTMLElement>(".column");
      if (column) {
        event.preventDefault();
        column.classList.add("dragover");
      }
    });
    board.addEventListener("dragleave", (event) => {
      (event.target as HTMLElement).closest<HTMLElement>(".column")?.classList.remove("dragover");
    });
    board.addEventListener("drop", (event) => {
      const column = (event.target as HTMLElement).closest<HTMLElement>(".column");
      if (!column?.dataset.theme || !(event instanceof DragEvent) || !event.dataTransfer) return;
      event.preventDefault();
      column.classList.remove("dragover");
      const term = event.dataTransfer.getData("application/x-term");
      if (!term) return;
      this.commit({
        kind: "assign",
        term,
        theme: column.dataset.theme,
        gender: (column.dataset.gender as Gender) ?? this.gender,
        direct: true,
      });
    });

    board.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const column = target.closest<HTMLElement>(".column");
      if (!column?.dataset.theme) return;
      const theme = column.dataset.theme;
      const card = target.closest<HTMLElement>(".card");

      if (target.classList.contains("toggle-indirect") && card?.dataset.term) {
        const indirect = card.classList.contains("indirect");
        this.commit({
          kind: "assign",
          term: card.dataset.term,
          theme,
          gender: (column.dataset.gender as Gender) ?? this.gender,
          direct: indirect,
        });
      } else if (target.classList.contains("remove-term") && card?.dataset.term) {
        this.commit({ kind: "remove", theme, term: card.dataset.term });
      } else if (target.classList.contains("rename-theme")) {
        const rename = window.prompt(`rename theme "${theme}" to:`, theme);
        if (rename && rename.trim() && rename !== theme) {
          this.commit({ kind: "rename", theme, rename: rename.trim() });
        }
      } else if (target.classList.contains("edit-notes")) {
        const current = this.sync.state.columns.find((c) => c.name === theme)?.notes ?? "";
        const notes = window.prompt(`notes for "${theme}":`, current);
        if (notes !== null) this.commit({ kind: "notes", theme, notes });
      } else if (target.classList.contains("delete-theme")) {
        if (window.confirm(`delete theme "${theme}"?`)) {
          this.commit({ kind: "delete", theme });
        }
      }
    });

    el<HTMLInputElement>("brackets-toggle").onchange = (event) => {
      this.brackets = (event.target as HTMLInputElement).checked;
      this.renderBoard(this.sync.state);
    };

    el("validate-themes").onclick = () => {
      void this.withBanner(async () => {
        const result = await this.api.validateThemes();
        el("findings").innerHTML = findingsHtml(result.findings);
      }, () => el("validate-themes").click());
    };
  }

  private wireThemeForm(): void {
    el("theme-create").onclick = () => {
      const nameInput = el<HTMLInputElement>("theme-name");
      const genderInput = el<HTMLSelectElement>("theme-gender");
      const error = el("theme-name-error");
      const problem = validateThemeName(this.sync.state, nameInput.value);
      if (problem) {
        error.textContent = problem;
        return;
      }
      error.textContent = "";
      this.commit({
        kind: "create",
        name: nameInput.value.trim(),
        gender: genderInput.value as Gender,
        notes: "",
      });
      nameInput.value = "";
    };
  }
}

export const startWorkbench = (api: Api = new Api(globalThis.fetch.bind(globalThis))): Workbench => {
  const workbench = new Workbench(api);
  void workbench.boot();
  return workbench;
};

export { ApiError };
