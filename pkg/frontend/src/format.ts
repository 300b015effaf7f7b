/** Display helpers. Probabilities render at two decimals; exported
 * documents keep full precision (formatting never touches payloads). */

export function displayProb(p: number): string {
  return p.toFixed(2);
}

export function literalText(template: string, token: string, negated: boolean): string {
  return negated ? `NOT ${token} @ ${template}` : `${token} @ ${template}`;
}

export function clauseText(parts: string[]): string {
  return parts.join(" AND ");
}

export function accuracyText(accuracy: Record<string, number>): string[] {
  return Object.entries(accuracy)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([cls, value]) => `${cls}: ${(value * 100).toFixed(0)}%`);
}
