/**
 * HTML fragment builders.
 *
 * Pure string producers so they can be unit tested without a DOM; the
 * ui module assigns the results to innerHTML and wires events by
 * delegation. Every dynamic value passes through esc(). No statistic is
 * computed here: numbers are API response fields, reformatted for
 * display only.
 */
import { cardLabel } from "./board.js";
import type { BoardState } from "./board.js";
import { windowSegments } from "./kwic.js";
import type {
  CooccurResponse,
  KwicResponse,
  LedgerFinding,
  TermEntry,
  TermsResponse,
} from "./types.js";

export const esc = (value: string): string =>
  value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");

const fmtChi2 = (value: number): string => value.toFixed(1);

const fmtP = (value: number): string => (value === 0 ? "0" : value.toPrecision(3));

const fmtPct = (value: number): string => `${Math.round(value * 100)}%`;

const fmtRatio = (value: number | null | undefined): string =>
  value === null || value === undefined ? "∞" : value.toFixed(2);

// -- term browser -------------------------------------------------------------

export const termTableHtml = (entries: TermEntry[], selected: string | null): string => {
  if (entries.length === 0) {
    return '<tr><td colspan="8" class="empty">no terms on this list</td></tr>';
  }
  return entries
    .map((e) => {
      const classes = [e.term === selected ? "selected" : "", e.fdr_selected ? "fdr" : ""]
        .filter(Boolean)
        .join(" ");
      return (
        `<tr class="${classes}" draggable="true" data-term="${esc(e.term)}">` +
        `<td class="num">${e.rank}</td>` +
        `<td class="term">${esc(e.term)}</td>` +
        `<td class="num" title="articles ${e.gender_count} vs ${e.other_count}">${esc(e.ratio_display)}</td>` +
        `<td class="num">${fmtRatio(e.author_ratio)}</td>` +
        `<td class="num">${fmtChi2(e.chi2)}</td>` +
        `<td class="num">${fmtP(e.p_value)}</td>` +
        `<td class="num">${e.fdr_selected ? "✓" : ""}</td>` +
        `<td class="num">${e.crossfield_total ?? 0}</td>` +
        `</tr>`
      );
    })
    .join("");
};

export const termListCaption = (resp: TermsResponse): string => {
  const parts = [`${resp.entries.length} terms`, `ordered by ${esc(resp.ordered_by)}`];
  if (resp.fdr) {
    parts.push(`FDR α=${resp.fdr.alpha}: ${resp.fdr.selected} selected`);
  }
  if (resp.field_name) {
    parts.push(`field ${esc(resp.field_name)} (${esc(resp.broad_name ?? "")})`);
  }
  return parts.join(" · ");
};

// -- KWIC ---------------------------------------------------------------------

const genderBadge = (gender: string): string =>
  `<span class="badge gender-${esc(gender.toLowerCase())}">${esc(gender)}</span>`;

export const kwicPanelHtml = (resp: KwicResponse, fieldNames: Record<string, [string, string]>): string => {
  if (resp.samples.length === 0) {
    return `<p class="empty">no occurrences of “${esc(resp.term)}” in this slice</p>`;
  }
  const items = resp.samples
    .map((sample) => {
      const windowHtml = windowSegments(sample)
        .map((seg) => (seg.hit ? `<mark>${esc(seg.text)}</mark>` : esc(seg.text)))
        .join("");
      const fieldBadges = sample.fields
        .map((code) => {
          const label = fieldNames[code]?.[0] ?? code;
          return `<span class="badge field" title="${esc(label)}">${esc(code)}</span>`;
        })
        .join("");
      return (
        `<li>` +
        `<span class="badges">${genderBadge(sample.gender)}${fieldBadges}` +
        `<span class="badge article">${esc(sample.article_id)}</span></span>` +
        `<span class="window">${windowHtml}</span>` +
        `</li>`
      );
    })
    .join("");
  return (
    `<p class="panel-caption">${resp.samples.length} of ${resp.total_matches} matching articles</p>` +
    `<ul class="kwic">${items}</ul>`
  );
};

// -- co-occurrence ------------------------------------------------------------

export const cooccurPanelHtml = (resp: CooccurResponse): string => {
  const caption =
    `<p class="panel-caption">anchor “${esc(resp.anchor)}” in ${resp.anchor_docs} articles ` +
    `vs ${resp.other_docs} baseline (${esc(resp.baseline)}` +
    `${resp.gender ? `, ${esc(resp.gender)} authors` : ""})</p>`;
  if (resp.entries.length === 0) {
    return caption + '<p class="empty">no overrepresented companions</p>';
  }
  const rows = resp.entries
    .map(
      (e) =>
        `<tr data-term="${esc(e.term)}">` +
        `<td class="term">${esc(e.term)}</td>` +
        `<td class="num">${e.with_anchor}</td>` +
        `<td class="num">${fmtPct(e.share_with)}</td>` +
        `<td class="num">${fmtPct(e.share_without)}</td>` +
        `<td class="num">${fmtChi2(e.chi2)}</td>` +
        `<td class="num">${fmtP(e.p_value)}</td>` +
        `</tr>`,
    )
    .join("");
  return (
    caption +
    `<table class="cooccur"><thead><tr>` +
    `<th>term</th><th>with</th><th>share</th><th>baseline</th><th>chi2</th><th>p</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
};

// -- theme board ----------------------------------------------------------------

export const boardHtml = (state: BoardState, brackets: boolean): string => {
  if (state.columns.length === 0) {
    return '<p class="empty">no themes yet; create one below and drag terms in</p>';
  }
  return state.columns
    .map((column) => {
      const cards = column.cards
        .map(
          (card) =>
            `<li class="card${card.indirect ? " indirect" : ""}" draggable="true"` +
            ` data-term="${esc(card.term)}" data-theme="${esc(column.name)}">` +
            `<span class="label">${esc(cardLabel(card.term, card.indirect, brackets))}</span>` +
            `<button class="toggle-indirect" title="${card.indirect ? "make direct" : "make indirect"}">` +
            `${card.indirect ? "←" : "[·]"}</button>` +
            `<button class="remove-term" title="remove from theme">×</button>` +
            `</li>`,
        )
        .join("");
      return (
        `<section class="column" data-theme="${esc(column.name)}" data-gender="${esc(column.gender)}">` +
        `<header>` +
        `<h3>${esc(column.name)}</h3>${genderBadge(column.gender)}` +
        `<button class="rename-theme" title="rename">✎</button>` +
        `<button class="edit-notes" title="notes">≡</button>` +
        `<button class="delete-theme" title="delete theme">×</button>` +
        `</header>` +
        (column.notes ? `<p class="notes">${esc(column.notes)}</p>` : "") +
        `<ul class="cards">${cards}</ul>` +
        `</section>`
      );
    })
    .join("");
};

export const findingsHtml = (findings: LedgerFinding[]): string => {
  if (findings.length === 0) {
    return '<p class="empty">ledger is consistent with the current run</p>';
  }
  return (
    "<ul class='findings'>" +
    findings
      .map((f) => `<li class="finding ${esc(f.kind)}">${esc(f.kind)}: ${esc(f.message)}</li>`)
      .join("") +
    "</ul>"
  );
};
