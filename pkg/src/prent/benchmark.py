"""Quantitative evaluation harness: features, shallow classifiers, sweeps.

Event descriptions become bag-of-words count features, optionally extended
with pipeline tokens (entailed candidates, all prompted candidates, or random
candidates as a noise baseline). A logistic regression maps features to event
types. Candidates are scored once at the largest K with raw entailment
probabilities, so K/threshold sweeps re-filter without re-running models and
the endpoint identities hold exactly.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from sklearn.feature_extraction import DictVectorizer
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import (
    accuracy_score,
    confusion_matrix,
    precision_recall_fscore_support,
)

from .backends.base import BackendSuite
from .corpus import EventRecord, tokenize
from .errors import (
    DegenerateLabels,
    InsufficientData,
    MissingFatalities,
    MissingPipelineOutput,
)
from .pipeline import EventDescription, PipelineConfig, Template, run_template

FEATURE_PREFIX = "z::"
MODES = ("bow", "pr", "prent", "random")


@dataclass(frozen=True)
class ScoredCandidates:
    """Ranked top-K candidates with fill and entailment probabilities.

    Holds the full scoring so candidate/entailed sets at any smaller K or any
    threshold can be derived without another model call.
    """

    tokens: tuple[str, ...]
    fill_p: tuple[float, ...]
    entail_p: tuple[float, ...]

    def candidates(self, k: int) -> list[str]:
        return list(self.tokens[:k])

    def entailed(self, k: int, threshold: float) -> list[str]:
        return [t for t, e in zip(self.tokens[:k], self.entail_p[:k]) if e >= threshold]


def score_records(
    records: list[EventRecord],
    template: Template,
    config: PipelineConfig,
    backends: BackendSuite,
    max_k: int | None = None,
) -> dict[str, ScoredCandidates]:
    """Run the pipeline once per record at the widest K with no filtering."""
    probe = PipelineConfig(
        top_k=max_k or config.top_k,
        entail_threshold=0.0,
        allowed_tokens=config.allowed_tokens,
    )
    scored = {}
    for record in records:
        event = EventDescription(record.description, id=record.id)
        _, entailed = run_template(event, template, probe, backends)
        scored[record.id] = ScoredCandidates(
            tokens=tuple(t for t, _, _ in entailed.entailed),
            fill_p=tuple(f for _, f, _ in entailed.entailed),
            entail_p=tuple(e for _, _, e in entailed.entailed),
        )
    return scored


@dataclass
class FeatureMatrix:
    ids: list[str]
    vocabulary: list[str]
    matrix: sparse.csr_matrix
    mode: str

    def project(self, vocabulary: list[str]) -> sparse.csr_matrix:
        """Counts re-aligned to another vocabulary; unknown columns drop."""
        position = {name: j for j, name in enumerate(vocabulary)}
        col_map = np.array([position.get(name, -1) for name in self.vocabulary], dtype=int)
        coo = self.matrix.tocoo()
        keep = col_map[coo.col] >= 0
        return sparse.csr_matrix(
            (coo.data[keep], (coo.row[keep], col_map[coo.col][keep])),
            shape=(self.matrix.shape[0], len(vocabulary)),
        )


def _extra_tokens(
    record: EventRecord,
    mode: str,
    scored: dict[str, ScoredCandidates] | None,
    config: PipelineConfig,
    seed: int,
) -> list[str]:
    if mode == "bow":
        return []
    if scored is None or record.id not in scored:
        raise MissingPipelineOutput(f"mode {mode!r} needs pipeline output for {record.id!r}")
    sc = scored[record.id]
    if mode == "prent":
        return sc.entailed(config.top_k, config.entail_threshold)
    if mode == "pr":
        return sc.candidates(config.top_k)
    if mode == "random":
        pool = sc.candidates(config.top_k)
        rng = random.Random(f"{seed}:{record.id}")
        return sorted(rng.sample(pool, min(10, len(pool))))
    raise ValueError(f"unknown featurization mode {mode!r}")


def featurize(
    records: list[EventRecord],
    mode: str,
    scored: dict[str, ScoredCandidates] | None = None,
    config: PipelineConfig = PipelineConfig(),
    seed: int = 0,
) -> FeatureMatrix:
    """Token-count features, plus prefixed pipeline tokens outside bow mode."""
    feature_dicts = []
    for record in records:
        features = Counter(tokenize(record.description))
        for token in _extra_tokens(record, mode, scored, config, seed):
            features[FEATURE_PREFIX + token] += 1
        feature_dicts.append(dict(features))
    vectorizer = DictVectorizer(sparse=True)
    matrix = vectorizer.fit_transform(feature_dicts)
    return FeatureMatrix(
        ids=[r.id for r in records],
        vocabulary=list(vectorizer.get_feature_names_out()),
        matrix=matrix.tocsr(),
        mode=mode,
    )


@dataclass(frozen=True)
class ClassifierConfig:
    regularization: float = 1.0
    max_iter: int = 1000
    seed: int = 0


@dataclass
class MetricsReport:
    accuracy: float
    f1: float
    precision: float
    recall: float
    labels: list[str]
    per_class: dict[str, dict[str, float]]
    confusion: np.ndarray
    average: str = "weighted"

    @classmethod
    def from_predictions(
        cls, y_true: list, y_pred: list, average: str = "weighted",
        positive_label=None,
    ) -> "MetricsReport":
        labels = sorted(set(y_true) | set(y_pred), key=str)
        cm = confusion_matrix(y_true, y_pred, labels=labels)
        p_all, r_all, f_all, support = precision_recall_fscore_support(
            y_true, y_pred, labels=labels, zero_division=0
        )
        per_class = {
            str(lbl): {"precision": float(p), "recall": float(r), "f1": float(f),
                       "support": int(s)}
            for lbl, p, r, f, s in zip(labels, p_all, r_all, f_all, support)
        }
        kwargs = {"average": average, "zero_division": 0, "labels": labels}
        if average == "binary":
            kwargs["pos_label"] = positive_label
            kwargs.pop("labels")
        precision, recall, f1, _ = precision_recall_fscore_support(y_true, y_pred, **kwargs)
        report = cls(
            accuracy=float(accuracy_score(y_true, y_pred)),
            f1=float(f1),
            precision=float(precision),
            recall=float(recall),
            labels=[str(lbl) for lbl in labels],
            per_class=per_class,
            confusion=cm,
            average=average,
        )
        report.verify()
        return report

    def verify(self) -> None:
        total = int(self.confusion.sum())
        if total:
            assert abs(np.trace(self.confusion) / total - self.accuracy) < 1e-9
        for i, lbl in enumerate(self.labels):
            assert int(self.confusion[i].sum()) == self.per_class[lbl]["support"]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "average": self.average,
            "labels": self.labels,
            "per_class": self.per_class,
            "confusion": self.confusion.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        width = max([len(lbl) for lbl in self.labels] + [8])
        lines = [
            f"accuracy {self.accuracy:.3f}  f1 {self.f1:.3f}  "
            f"precision {self.precision:.3f}  recall {self.recall:.3f} ({self.average})",
            f"{'class':<{width}}  {'prec':>6}  {'rec':>6}  {'f1':>6}  {'support':>7}",
        ]
        for lbl in self.labels:
            c = self.per_class[lbl]
            lines.append(
                f"{lbl:<{width}}  {c['precision']:>6.3f}  {c['recall']:>6.3f}  "
                f"{c['f1']:>6.3f}  {c['support']:>7d}"
            )
        return "\n".join(lines)


def train_eval(
    features_train: FeatureMatrix,
    labels_train: list[str],
    features_test: FeatureMatrix,
    labels_test: list[str],
    classifier_config: ClassifierConfig = ClassifierConfig(),
) -> MetricsReport:
    """Multinomial logistic regression on train counts, scored on test."""
    if len(set(labels_train)) < 2:
        raise DegenerateLabels("training labels contain a single class")
    clf = LogisticRegression(
        C=classifier_config.regularization,
        max_iter=classifier_config.max_iter,
        random_state=classifier_config.seed,
    )
    clf.fit(features_train.matrix, labels_train)
    predictions = clf.predict(features_test.project(features_train.vocabulary))
    return MetricsReport.from_predictions(labels_test, list(predictions))


def _eval_mode(
    train: list[EventRecord],
    test: list[EventRecord],
    mode: str,
    scored_train: dict[str, ScoredCandidates] | None,
    scored_test: dict[str, ScoredCandidates] | None,
    config: PipelineConfig,
    classifier_config: ClassifierConfig,
    seed: int = 0,
) -> MetricsReport:
    fm_train = featurize(train, mode, scored_train, config, seed)
    fm_test = featurize(test, mode, scored_test, config, seed)
    return train_eval(fm_train, [r.label for r in train], fm_test,
                      [r.label for r in test], classifier_config)


def learning_curve(
    train: list[EventRecord],
    test: list[EventRecord],
    sizes: list[int],
    modes: list[str],
    scored_train: dict[str, ScoredCandidates] | None,
    scored_test: dict[str, ScoredCandidates] | None,
    config: PipelineConfig = PipelineConfig(),
    classifier_config: ClassifierConfig = ClassifierConfig(),
    seed: int = 0,
) -> dict[str, list[tuple[int, MetricsReport]]]:
    """Metrics per training-set size; smaller sets are prefixes of larger ones."""
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly increasing")
    if sizes and sizes[-1] > len(train):
        raise InsufficientData(f"largest size {sizes[-1]} exceeds {len(train)} train records")
    shuffled = list(train)
    random.Random(seed).shuffle(shuffled)
    curves: dict[str, list[tuple[int, MetricsReport]]] = {m: [] for m in modes}
    for size in sizes:
        subset = shuffled[:size]
        for mode in modes:
            report = _eval_mode(subset, test, mode, scored_train, scored_test,
                                config, classifier_config, seed)
            curves[mode].append((size, report))
    return curves


def learning_curve_csv(curves: dict[str, list[tuple[int, "MetricsReport"]]]) -> str:
    lines = ["mode,size,accuracy,f1"]
    for mode in sorted(curves):
        for size, report in curves[mode]:
            lines.append(f"{mode},{size},{report.accuracy:.10f},{report.f1:.10f}")
    return "\n".join(lines) + "\n"


@dataclass
class SweepResult:
    parameter: str
    grid: list[float]
    f1: list[float]
    accuracy: list[float] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [f"{self.parameter},f1,accuracy"]
        for value, f1, acc in zip(self.grid, self.f1, self.accuracy):
            lines.append(f"{value:g},{f1:.10f},{acc:.10f}")
        return "\n".join(lines) + "\n"


def sweep(
    train: list[EventRecord],
    test: list[EventRecord],
    parameter: str,
    grid: list[float],
    scored_train: dict[str, ScoredCandidates],
    scored_test: dict[str, ScoredCandidates],
    config: PipelineConfig = PipelineConfig(),
    classifier_config: ClassifierConfig = ClassifierConfig(),
) -> SweepResult:
    """F1 across a hyperparameter grid.

    K = 0 and threshold = 1 coincide with the bare-description baseline;
    threshold = 0 coincides with keeping every prompted candidate.
    """
    if list(grid) != sorted(set(grid)):
        raise ValueError("grid must be strictly increasing")
    if parameter == "top_k":
        if any(v < 0 or v != int(v) for v in grid):
            raise ValueError("top_k grid must hold non-negative integers")
    elif parameter == "entail_threshold":
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise ValueError("entail_threshold grid must lie in [0, 1]")
    else:
        raise ValueError(f"unknown sweep parameter {parameter!r}")

    f1s, accuracies = [], []
    for value in grid:
        if parameter == "top_k":
            point = PipelineConfig(top_k=max(int(value), 1),
                                   entail_threshold=config.entail_threshold)
            mode = "bow" if value == 0 else "prent"
        else:
            point = PipelineConfig(top_k=config.top_k, entail_threshold=value)
            mode = "prent"
        report = _eval_mode(train, test, mode, scored_train, scored_test,
                            point, classifier_config)
        f1s.append(report.f1)
        accuracies.append(report.accuracy)
    return SweepResult(parameter, list(grid), f1s, accuracies)


LETHAL_TOKEN = "killed"


def lethal_rule_eval(
    records: list[EventRecord],
    scored: dict[str, ScoredCandidates],
    config: PipelineConfig = PipelineConfig(),
) -> dict[str, MetricsReport]:
    """Rule-based lethal/non-lethal coding, no classifier involved.

    An event is predicted lethal when "killed" survives entailment (entailed
    mode) or merely appears among the prompted candidates (prompt-only mode);
    ground truth is at least one recorded fatality.
    """
    if any(r.fatalities is None for r in records):
        raise MissingFatalities("every record needs a fatality count")
    y_true = [int(r.fatalities >= 1) for r in records]
    pred = {}
    for mode in ("pr", "prent"):
        pred[mode] = []
        for record in records:
            sc = scored.get(record.id)
            if sc is None:
                raise MissingPipelineOutput(f"no pipeline output for {record.id!r}")
            tokens = (
                sc.candidates(config.top_k)
                if mode == "pr"
                else sc.entailed(config.top_k, config.entail_threshold)
            )
            pred[mode].append(int(LETHAL_TOKEN in tokens))
    # entailment only removes candidates, so entailed positives nest inside
    # prompt-only positives
    assert all(e <= p for e, p in zip(pred["prent"], pred["pr"]))
    return {
        mode: MetricsReport.from_predictions(y_true, pred[mode], average="binary",
                                             positive_label=1)
        for mode in ("pr", "prent")
    }
