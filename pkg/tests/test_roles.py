import json

import pytest

from prent.backends import BackendSuite, TableQABackend
from prent.roles import RoleResult, build_role_questions, extract_roles, role_json_line


class TestQuestions:
    @pytest.mark.parametrize(
        "action,who,whom",
        [
            ("injured", "Who injured people?", "Who was injured?"),
            ("arrested", "Who arrested people?", "Who was arrested?"),
            ("killed", "Who killed people?", "Who was killed?"),
        ],
    )
    def test_frames(self, action, who, whom):
        assert build_role_questions(action) == (who, whom)

    def test_rejects_multiword(self):
        with pytest.raises(ValueError):
            build_role_questions("two words")

    def test_warns_on_noun_like_tokens(self):
        with pytest.warns(UserWarning):
            build_role_questions("kidnapping")

    def test_irregular_past_forms_accepted_silently(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            build_role_questions("shot")


def _qa_suite(table, floor=0.0):
    return BackendSuite(fill=None, nli=None, qa=TableQABackend(table, floor))


ARREST_CONTEXT = "Arrests: police captured a senior commander."


class TestExtractRoles:
    TABLE = {
        "Who arrested people?": {"answer": "police", "confidence": 0.31},
        "Who was arrested?": {"answer": "a senior commander", "confidence": 0.90},
    }

    def test_arrest_example(self):
        result = extract_roles(ARREST_CONTEXT, "arrested", _qa_suite(self.TABLE))
        assert result.who.text == "police"
        assert result.whom.text == "a senior commander"
        assert ARREST_CONTEXT[result.who.start : result.who.end] == "police"
        assert result.who.confidence == 0.31
        assert result.whom.confidence == 0.90

    def test_missing_agent_leaves_who_absent(self):
        table = {
            "Who kidnapped people?": {"answer": None, "confidence": 0.0},
            "Who was kidnapped?": {"answer": "Two traders", "confidence": 0.8},
        }
        result = extract_roles("Two traders were kidnapped overnight.", "kidnapped",
                               _qa_suite(table))
        assert result.who is None
        assert result.whom.text == "Two traders"

    def test_floor_monotonicity(self):
        floors = [0.0, 0.31, 0.5, 0.9, 0.95]
        answered = []
        for floor in floors:
            result = extract_roles(ARREST_CONTEXT, "arrested", _qa_suite(self.TABLE),
                                   confidence_floor=floor)
            answered.append({name for name in ("who", "whom")
                             if getattr(result, name) is not None})
        for looser, stricter in zip(answered, answered[1:]):
            assert stricter <= looser

    def test_multi_pattern_event_distinct_pairs(self):
        context = (
            "Officers raided the home of a retired general. The candidate was "
            "arrested after a TV interview; reporters interviewed his family."
        )
        table = {
            "Who arrested people?": {"answer": "Officers", "confidence": 0.4},
            "Who was arrested?": {"answer": "The candidate", "confidence": 0.6},
            "Who interviewed people?": {"answer": "reporters", "confidence": 0.5},
            "Who was interviewed?": {"answer": "his family", "confidence": 0.3},
        }
        suite = _qa_suite(table)
        arrested = extract_roles(context, "arrested", suite)
        interviewed = extract_roles(context, "interviewed", suite)
        assert (arrested.who.text, arrested.whom.text) == ("Officers", "The candidate")
        assert (interviewed.who.text, interviewed.whom.text) == ("reporters", "his family")
        assert arrested.whom.text != interviewed.whom.text

    def test_simulated_backend_end_to_end(self, simulated):
        context = "Two men were kidnapped by rebels."
        result = extract_roles(context, "kidnapped", simulated)
        assert result.whom.text == "Two men"
        assert result.who.text == "rebels"

    def test_jsonl_shape(self):
        result = extract_roles(ARREST_CONTEXT, "arrested", _qa_suite(self.TABLE))
        line = json.loads(role_json_line("e1", result))
        assert line["event_id"] == "e1"
        assert line["action"] == "arrested"
        assert line["who"] == {"text": "police", "start": 9, "end": 15, "conf": 0.31}
        assert set(line["whom"]) == {"text", "start", "end", "conf"}

    def test_absent_spans_serialize_as_null(self):
        line = json.loads(role_json_line("e2", RoleResult("arrested", None, None)))
        assert line["who"] is None and line["whom"] is None
