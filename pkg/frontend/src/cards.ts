import type { CandidatePayload } from "./types.js";

/** Card caption: the novelty score and the hidden-node count. */
export function caption(candidate: CandidatePayload): string {
  const novelty =
    candidate.novelty === null ? "n/a" : candidate.novelty.toFixed(2);
  return `novelty ${novelty}, hidden ${candidate.hidden}`;
}

/** True when cards with scores appear in non-increasing novelty order. */
export function noveltyDescending(candidates: CandidatePayload[]): boolean {
  let previous = Infinity;
  for (const candidate of candidates) {
    if (candidate.novelty === null) {
      continue;
    }
    if (candidate.novelty > previous + 1e-9) {
      return false;
    }
    previous = candidate.novelty;
  }
  return true;
}
