/**
 * Metavariable color assignment.
 *
 * The service reports a color index per metavariable (its declaration
 * position in the rule). Both the sidebar schema spans and the outlines
 * drawn around concrete subterms in the tree must go through this one
 * mapping, so the two can never disagree.
 */

export const PALETTE_SIZE = 6;

export function colorClass(index: number): string {
  return `mv-c${((index % PALETTE_SIZE) + PALETTE_SIZE) % PALETTE_SIZE}`;
}
