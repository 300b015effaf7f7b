"""Actor/target extraction: who did the action, who did it happen to.

Action tokens surfaced by the pipeline (past forms from "People were [Z].")
slot into two question frames answered by an extractive QA model over the
event description. Answers below the confidence floor are dropped, not
errors.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

from .backends.base import BackendSuite, SpanAnswer
from .errors import NoAnswer

# past forms that do not end in -ed but still read well in both frames
_IRREGULAR_PAST = frozenset(
    "shot held hurt beaten slain torn burnt struck caught taken driven "
    "forbidden stolen bound shut hit cut".split()
)


@dataclass(frozen=True)
class RoleResult:
    action: str
    who: SpanAnswer | None
    whom: SpanAnswer | None


def build_role_questions(action: str) -> tuple[str, str]:
    """(who_question, whom_question) for one action token.

    Noun-like candidates make awkward questions; they are passed through with
    a warning and left to the QA model.
    """
    if not action or " " in action:
        raise ValueError(f"action must be a single token: {action!r}")
    if not (action.endswith("ed") or action in _IRREGULAR_PAST):
        warnings.warn(
            f"action {action!r} does not look like a past verb form; "
            "question quality is undefined"
        )
    return f"Who {action} people?", f"Who was {action}?"


def extract_roles(
    event_text: str,
    action: str,
    backends: BackendSuite,
    confidence_floor: float = 0.1,
) -> RoleResult:
    """Ask both role questions against the event description."""
    if backends.qa is None:
        raise ValueError("backend suite has no QA backend")
    who_question, whom_question = build_role_questions(action)
    answers: list[SpanAnswer | None] = []
    for question in (who_question, whom_question):
        try:
            answer = backends.qa.extractive_answer(question, event_text)
        except NoAnswer:
            answers.append(None)
            continue
        answer.verify(event_text)
        answers.append(answer if answer.confidence >= confidence_floor else None)
    return RoleResult(action, who=answers[0], whom=answers[1])


def role_json_line(event_id: str, result: RoleResult) -> str:
    def span_dict(span: SpanAnswer | None):
        if span is None:
            return None
        return {"text": span.text, "start": span.start, "end": span.end,
                "conf": span.confidence}

    return json.dumps(
        {
            "event_id": event_id,
            "action": result.action,
            "who": span_dict(result.who),
            "whom": span_dict(result.whom),
        }
    )
