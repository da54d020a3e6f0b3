/**
 * Filtering and sorting for the term browser.
 *
 * Pure functions over API term entries; nothing here computes a
 * statistic, it only reorders and filters what the server sent.
 */
import type { TermEntry } from "./types.js";

export type SortKey = "rank" | "chi2" | "ratio" | "fields";

export const filterEntries = (entries: TermEntry[], filter: string): TermEntry[] => {
  const needle = filter.trim().toLowerCase();
  if (!needle) return entries;
  return entries.filter((e) => e.term.toLowerCase().includes(needle));
};

// A null term_ratio encodes an infinite ratio (the other gender never
// uses the term), so it sorts above every finite value.
const ratioValue = (e: TermEntry): number =>
  e.term_ratio === null ? Number.POSITIVE_INFINITY : e.term_ratio;

const sortValue = (e: TermEntry, key: SortKey): number => {
  switch (key) {
    case "rank":
      return e.rank;
    case "chi2":
      return e.chi2;
    case "ratio":
      return ratioValue(e);
    case "fields":
      return e.crossfield_total ?? 0;
  }
};

export const sortEntries = (entries: TermEntry[], key: SortKey): TermEntry[] => {
  const ascending = key === "rank";
  return [...entries].sort((a, b) => {
    const diff = sortValue(a, key) - sortValue(b, key);
    if (diff !== 0) return ascending ? diff : -diff;
    return a.term < b.term ? -1 : a.term > b.term ? 1 : 0;
  });
};
