/** Codebook draft editing, constrained to the service's rule shape:
 * every event type is a disjunction (any_of) of conjunctions (all_of) of
 * (template, token, negated) literals. The draft refuses to serialize while
 * invalid, so anything saved is schema-valid by construction. */

import type { CodebookDoc, LiteralDoc, RuleDoc } from "./types.js";

export interface Literal {
  template: string;
  token: string;
  negated: boolean;
}

export function literalKey(lit: Literal): string {
  return `${lit.template}${lit.token}${lit.negated}`;
}

export class CodebookDraft {
  readonly templates: Record<string, { text: string }>;
  private types = new Map<string, Literal[][]>();

  constructor(
    public name: string,
    templates: Record<string, string>,
    public version = "1",
  ) {
    this.templates = Object.fromEntries(
      Object.entries(templates).map(([id, text]) => [id, { text }]),
    );
  }

  static fromDocument(doc: CodebookDoc): CodebookDraft {
    const draft = new CodebookDraft(
      doc.name,
      Object.fromEntries(Object.entries(doc.templates).map(([id, t]) => [id, t.text])),
      doc.version,
    );
    for (const [typeName, rule] of Object.entries(doc.event_types)) {
      draft.addEventType(typeName);
      rule.any_of.forEach((clause, i) => {
        if (i > 0) draft.addClause(typeName);
        for (const lit of clause.all_of) {
          draft.addLiteral(typeName, i, {
            template: lit.template,
            token: lit.token,
            negated: lit.negated ?? false,
          });
        }
      });
    }
    return draft;
  }

  eventTypes(): string[] {
    return [...this.types.keys()];
  }

  clauses(typeName: string): Literal[][] {
    const clauses = this.types.get(typeName);
    if (!clauses) throw new Error(`unknown event type ${typeName}`);
    return clauses.map((clause) => clause.map((lit) => ({ ...lit })));
  }

  addEventType(typeName: string): void {
    if (!typeName.trim()) throw new Error("event type name is empty");
    if (this.types.has(typeName)) throw new Error(`event type ${typeName} exists`);
    this.types.set(typeName, [[]]);
  }

  removeEventType(typeName: string): void {
    this.types.delete(typeName);
  }

  renameEventType(from: string, to: string): void {
    if (!this.types.has(from)) throw new Error(`unknown event type ${from}`);
    if (this.types.has(to)) throw new Error(`event type ${to} exists`);
    const entries = [...this.types.entries()].map(
      ([name, clauses]) => [name === from ? to : name, clauses] as const,
    );
    this.types = new Map(entries);
  }

  addClause(typeName: string): number {
    const clauses = this.types.get(typeName);
    if (!clauses) throw new Error(`unknown event type ${typeName}`);
    clauses.push([]);
    return clauses.length - 1;
  }

  removeClause(typeName: string, clauseIndex: number): void {
    const clauses = this.types.get(typeName);
    if (!clauses) throw new Error(`unknown event type ${typeName}`);
    clauses.splice(clauseIndex, 1);
    if (clauses.length === 0) clauses.push([]);
  }

  /** Add a literal; duplicates within the clause are ignored. Returns
   * whether the clause changed. */
  addLiteral(typeName: string, clauseIndex: number, literal: Literal): boolean {
    if (!(literal.template in this.templates)) {
      throw new Error(`unknown template ${literal.template}`);
    }
    if (!literal.token.trim()) throw new Error("literal token is empty");
    const clause = this.clauseRef(typeName, clauseIndex);
    if (clause.some((lit) => literalKey(lit) === literalKey(literal))) return false;
    clause.push({ ...literal });
    return true;
  }

  removeLiteral(typeName: string, clauseIndex: number, literalIndex: number): void {
    this.clauseRef(typeName, clauseIndex).splice(literalIndex, 1);
  }

  /** The exclusion toggle: flips a literal between required and forbidden. */
  toggleNegation(typeName: string, clauseIndex: number, literalIndex: number): void {
    const clause = this.clauseRef(typeName, clauseIndex);
    const literal = clause[literalIndex];
    if (!literal) throw new Error(`no literal at index ${literalIndex}`);
    const flipped = { ...literal, negated: !literal.negated };
    if (clause.some((lit, i) => i !== literalIndex && literalKey(lit) === literalKey(flipped))) {
      throw new Error("flipping would duplicate a literal in this clause");
    }
    clause[literalIndex] = flipped;
  }

  private clauseRef(typeName: string, clauseIndex: number): Literal[] {
    const clauses = this.types.get(typeName);
    if (!clauses) throw new Error(`unknown event type ${typeName}`);
    const clause = clauses[clauseIndex];
    if (!clause) throw new Error(`no clause at index ${clauseIndex}`);
    return clause;
  }

  /** Schema-validity problems, empty when the draft can be saved. */
  validate(): string[] {
    const problems: string[] = [];
    if (!this.name.trim()) problems.push("codebook name is empty");
    if (Object.keys(this.templates).length === 0) problems.push("no templates");
    for (const [typeName, clauses] of this.types.entries()) {
      if (clauses.length === 0) problems.push(`${typeName}: no clauses`);
      clauses.forEach((clause, i) => {
        if (clause.length === 0) problems.push(`${typeName}: clause ${i + 1} is empty`);
        for (const lit of clause) {
          if (!(lit.template in this.templates)) {
            problems.push(`${typeName}: clause ${i + 1} references unknown template ${lit.template}`);
          }
        }
      });
    }
    return problems;
  }

  toDocument(): CodebookDoc {
    const problems = this.validate();
    if (problems.length > 0) {
      throw new Error(`draft is not saveable: ${problems.join("; ")}`);
    }
    const event_types: Record<string, RuleDoc> = {};
    for (const [typeName, clauses] of this.types.entries()) {
      event_types[typeName] = {
        any_of: clauses.map((clause) => ({
          all_of: clause.map(
            (lit): LiteralDoc => ({
              template: lit.template,
              token: lit.token,
              negated: lit.negated,
            }),
          ),
        })),
      };
    }
    return {
      name: this.name,
      version: this.version,
      templates: { ...this.templates },
      event_types,
    };
  }
}
