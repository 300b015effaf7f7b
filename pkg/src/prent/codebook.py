"""Boolean codebooks: event types as DNF rules over (template, token) literals.

A rule is a disjunction of conjunctions; each literal tests whether a token
survived entailment for a given template, optionally negated. Codebooks
serialize to a versioned JSON document and drive both batch coding and the
interactive accept/reject validation workflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import jsonschema

from .backends.base import BackendSuite
from .errors import DuplicateEvent, PrentError, SchemaViolation, UnknownTemplate
from .pipeline import EventDescription, PipelineConfig, Template, pr_ent

CODEBOOK_SCHEMA = {
    "type": "object",
    "required": ["name", "version", "templates", "event_types"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "version": {"type": "string", "minLength": 1},
        "templates": {
            "type": "object",
            "minProperties": 1,
            "additionalProperties": {
                "type": "object",
                "required": ["text"],
                "additionalProperties": False,
                "properties": {"text": {"type": "string", "minLength": 1}},
            },
        },
        "event_types": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["any_of"],
                "additionalProperties": False,
                "properties": {
                    "any_of": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["all_of"],
                            "additionalProperties": False,
                            "properties": {
                                "all_of": {
                                    "type": "array",
                                    "minItems": 1,
                                    "items": {
                                        "type": "object",
                                        "required": ["template", "token"],
                                        "additionalProperties": False,
                                        "properties": {
                                            "template": {"type": "string", "minLength": 1},
                                            "token": {"type": "string", "minLength": 1},
                                            "negated": {"type": "boolean"},
                                        },
                                    },
                                }
                            },
                        },
                    }
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Literal:
    """Tests membership of a token in one template's entailed set."""

    template_id: str
    token: str
    negated: bool = False

    def __post_init__(self):
        if not self.token:
            raise ValueError("literal token must be non-empty")

    def holds(self, entailed: dict[str, set[str]]) -> bool:
        if self.template_id not in entailed:
            raise UnknownTemplate(f"no entailed tokens for template {self.template_id!r}")
        present = self.token in entailed[self.template_id]
        return not present if self.negated else present


@dataclass(frozen=True)
class Rule:
    """Disjunctive normal form: any clause true makes the rule true."""

    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self):
        if not self.clauses:
            raise ValueError("rule needs at least one clause")
        for clause in self.clauses:
            if not clause:
                raise ValueError("clause needs at least one literal")
            if len(set(clause)) != len(clause):
                raise ValueError(f"duplicate literal within clause: {clause}")


def evaluate_rule(rule: Rule, entailed: dict[str, set[str]]) -> bool:
    """DNF evaluation over entailed-token sets (empty sets are fine)."""
    return any(all(lit.holds(entailed) for lit in clause) for clause in rule.clauses)


@dataclass(frozen=True)
class Codebook:
    name: str
    version: str
    templates: dict[str, Template]
    event_types: dict[str, Rule]

    def __post_init__(self):
        for type_name, rule in self.event_types.items():
            for clause in rule.clauses:
                for lit in clause:
                    if lit.template_id not in self.templates:
                        raise ValueError(
                            f"event type {type_name!r} references unknown template "
                            f"{lit.template_id!r}"
                        )

    def template_list(self) -> list[Template]:
        return list(self.templates.values())


def code_event_detailed(
    event: EventDescription,
    codebook: Codebook,
    config: PipelineConfig,
    backends: BackendSuite,
):
    """Coded types plus the per-template entailed sets that produced them."""
    errors: dict[str, Exception] = {}
    results = pr_ent(event, codebook.template_list(), config, backends, errors=errors)
    if errors:
        template_id, exc = next(iter(errors.items()))
        raise PrentError(f"pipeline failed for template {template_id!r}: {exc}") from exc
    entailed = {tid: set(es.tokens()) for tid, es in results.items()}
    types = {name for name, rule in codebook.event_types.items()
             if evaluate_rule(rule, entailed)}
    return types, results


def code_event(
    event: EventDescription,
    codebook: Codebook,
    config: PipelineConfig,
    backends: BackendSuite,
) -> set[str]:
    """All event types whose rule fires; multi-label, possibly empty."""
    types, _ = code_event_detailed(event, codebook, config, backends)
    return types


def import_codebook(document: dict) -> Codebook:
    """Parse and validate a codebook document; errors carry the JSON path."""
    try:
        jsonschema.validate(document, CODEBOOK_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path)
        raise SchemaViolation(exc.message, path) from None

    templates = {
        tid: Template(tid, spec["text"]) for tid, spec in document["templates"].items()
    }
    event_types = {}
    for name, rule_doc in document["event_types"].items():
        clauses = []
        for i, clause_doc in enumerate(rule_doc["any_of"]):
            clause = tuple(
                Literal(lit["template"], lit["token"], lit.get("negated", False))
                for lit in clause_doc["all_of"]
            )
            for j, lit in enumerate(clause):
                if lit.template_id not in templates:
                    raise SchemaViolation(
                        f"unknown template {lit.template_id!r}",
                        f"event_types.{name}.any_of.{i}.all_of.{j}.template",
                    )
            clauses.append(clause)
        event_types[name] = Rule(tuple(clauses))
    return Codebook(document["name"], document["version"], templates, event_types)


def export_codebook(codebook: Codebook) -> dict:
    """Inverse of import_codebook: import(export(cb)) == cb."""
    return {
        "name": codebook.name,
        "version": codebook.version,
        "templates": {tid: {"text": t.text} for tid, t in codebook.templates.items()},
        "event_types": {
            name: {
                "any_of": [
                    {
                        "all_of": [
                            {"template": lit.template_id, "token": lit.token,
                             "negated": lit.negated}
                            for lit in clause
                        ]
                    }
                    for clause in rule.clauses
                ]
            }
            for name, rule in codebook.event_types.items()
        },
    }


def canonical_json(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)


def load_codebook(path: str | Path) -> Codebook:
    with open(path, encoding="utf-8") as f:
        return import_codebook(json.load(f))


def save_codebook(codebook: Codebook, path: str | Path) -> None:
    Path(path).write_text(canonical_json(export_codebook(codebook)), encoding="utf-8")


@dataclass
class FeedbackEntry:
    event_id: str
    description: str
    suggested: frozenset[str]
    accepted: frozenset[str]
    timestamp: str


@dataclass
class ValidationSession:
    """Accept/reject bookkeeping that grows a labeled dataset on the go.

    Per class, an event counts as correct when the suggestion and the
    reviewer's decision agree on whether the class applies.
    """

    id: str
    codebook_name: str = ""
    labeled: list[FeedbackEntry] = field(default_factory=list)
    correct: dict[str, int] = field(default_factory=dict)

    def seen_ids(self) -> set[str]:
        return {entry.event_id for entry in self.labeled}

    def classes(self) -> set[str]:
        return set(self.correct)

    def record_feedback(
        self,
        event_id: str,
        suggested: set[str],
        accepted: set[str],
        description: str = "",
        timestamp: str | None = None,
    ) -> dict[str, float]:
        """Add one reviewed event and return updated per-class accuracies."""
        if event_id in self.seen_ids():
            raise DuplicateEvent(f"feedback for event {event_id!r} already recorded")
        when = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.labeled.append(
            FeedbackEntry(event_id, description, frozenset(suggested), frozenset(accepted), when)
        )
        for cls in set(suggested) | set(accepted):
            self.correct.setdefault(cls, 0)
        self._recount()
        return self.per_class_accuracy()

    def _recount(self) -> None:
        self.correct = {cls: 0 for cls in self.correct}
        for entry in self.labeled:
            for cls in self.correct:
                if (cls in entry.suggested) == (cls in entry.accepted):
                    self.correct[cls] += 1

    def per_class_accuracy(self) -> dict[str, float]:
        n = len(self.labeled)
        if n == 0:
            return {}
        return {cls: hits / n for cls, hits in sorted(self.correct.items())}

    def export_jsonl(self) -> str:
        lines = [
            json.dumps(
                {
                    "event_id": e.event_id,
                    "description": e.description,
                    "suggested": sorted(e.suggested),
                    "accepted": sorted(e.accepted),
                    "timestamp": e.timestamp,
                }
            )
            for e in self.labeled
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "codebook_name": self.codebook_name,
            "labeled": [
                {
                    "event_id": e.event_id,
                    "description": e.description,
                    "suggested": sorted(e.suggested),
                    "accepted": sorted(e.accepted),
                    "timestamp": e.timestamp,
                }
                for e in self.labeled
            ],
        }

    @classmethod
    def from_document(cls, document: dict) -> "ValidationSession":
        session = cls(id=document["id"], codebook_name=document.get("codebook_name", ""))
        for e in document.get("labeled", []):
            session.labeled.append(
                FeedbackEntry(
                    e["event_id"],
                    e.get("description", ""),
                    frozenset(e["suggested"]),
                    frozenset(e["accepted"]),
                    e["timestamp"],
                )
            )
        for entry in session.labeled:
            for cls in entry.suggested | entry.accepted:
                session.correct.setdefault(cls, 0)
        session._recount()
        return session
