/**
 * Keyword-in-context window segmentation.
 *
 * The API sends each sample as a window string plus [start, end) match
 * offsets into it. Rendering needs the window cut into alternating
 * plain and highlighted segments covering every offset.
 */
import type { KwicSample } from "./types.js";

export interface WindowSegment {
  text: string;
  hit: boolean;
}

export const windowSegments = (sample: KwicSample): WindowSegment[] => {
  const { window } = sample;
  const spans = sample.offsets
    .map(([a, b]): [number, number] => [
      Math.max(0, Math.min(a, window.length)),
      Math.max(0, Math.min(b, window.length)),
    ])
    .filter(([a, b]) => b > a)
    .sort((x, y) => x[0] - y[0]);

  const segments: WindowSegment[] = [];
  let cursor = 0;
  for (const [a, b] of spans) {
    if (a < cursor) continue; // overlapping offset; the earlier span wins
    if (a > cursor) segments.push({ text: window.slice(cursor, a), hit: false });
    segments.push({ text: window.slice(a, b), hit: true });
    cursor = b;
  }
  if (cursor < window.length) segments.push({ text: window.slice(cursor), hit: false });
  if (segments.length === 0) segments.push({ text: window, hit: false });
  return segments;
};
