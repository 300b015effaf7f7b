/** Wire formats of the coding service. */

export interface Candidate {
  token: string;
  fill_p: number;
  entail_p: number;
  entailed: boolean;
}

export interface TemplateResult {
  template_text: string;
  candidates: Candidate[];
}

export interface PrentResponse {
  threshold: number;
  results: Record<string, TemplateResult>;
  errors: Record<string, string>;
}

export interface LiteralDoc {
  template: string;
  token: string;
  negated: boolean;
}

export interface ClauseDoc {
  all_of: LiteralDoc[];
}

export interface RuleDoc {
  any_of: ClauseDoc[];
}

export interface CodebookDoc {
  name: string;
  version: string;
  templates: Record<string, { text: string }>;
  event_types: Record<string, RuleDoc>;
}

export interface SampledEvent {
  event_id: string;
  description: string;
  suggested: string[];
}

export interface FeedbackResponse {
  per_class_accuracy: Record<string, number>;
  labeled: number;
}

export interface SessionStatus {
  id: string;
  codebook: string;
  labeled: number;
  pending: string[];
  per_class_accuracy: Record<string, number>;
}

export interface CodedEvent {
  event_id: string;
  types: string[];
}
