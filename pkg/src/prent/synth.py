"""Synthetic event corpus generator.

Licensed conflict datasets cannot be redistributed, so the bundled corpora
are generated here: short event descriptions built from per-type surface
patterns whose cue words the simulated backends understand. Patterns vary in
frequency and some carry no cue at all, so classifiers face realistic
ambiguity. Regenerate the shipped files with ``python -m prent.synth``.
"""

from __future__ import annotations

import csv
import random
from datetime import date, timedelta
from pathlib import Path

from .corpus import EventRecord

ORGS = (
    "Red Valley Militia",
    "Northern Front",
    "Desert Lions",
    "Unity Movement",
    "Black River Brigade",
    "Southern Liberation Army",
)
LOCATIONS = (
    "Korda", "Melan", "Tessit", "Bandara", "Goru", "Zanera",
    "Palwai", "Dorsale", "Quari", "Lemti",
)
COUNTRIES = ("Azania", "Borland", "Cordova")

_NUMBER_WORDS = {"two": 2, "three": 3, "four": 4, "five": 5, "six": 6}

# (weight, text, fatality range) per event type; {n} is a number word whose
# value drives fatalities when the range is None
PATTERNS: dict[str, list[tuple[int, str, tuple[int, int] | None]]] = {
    "Killing": [
        (4, "Gunmen killed {n} villagers in {loc}.", None),
        (3, "{org} fighters shot and killed a trader near {loc}.", (1, 1)),
        (3, "Two civilians were killed when {org} attacked {loc}.", (2, 2)),
        (2, "Armed men executed a local official in {loc}.", (1, 1)),
        (2, "A farmer was murdered by unknown assailants near {loc}.", (1, 1)),
        (2, "Assailants left three people dead after a night raid in {loc}.", (3, 3)),
        (1, "Militia members beat a herder to death outside {loc}.", (1, 1)),
        (2, "{org} gunmen opened fire on a bus, killing {n} passengers near {loc}.", None),
    ],
    "Kidnapping": [
        (4, "Unknown gunmen abducted two aid workers near {loc}.", (0, 0)),
        (3, "{org} kidnapped a local chief in {loc}.", (0, 0)),
        (3, "{n} men were kidnapped by rebels in {loc}.", (0, 0)),
        (2, "Gunmen seized three students on the road to {loc} and demanded ransom.", (0, 0)),
        (2, "A driver was taken hostage by {org} militants near {loc}.", (0, 0)),
        (1, "{org} abducted a nurse from a clinic in {loc}; she was later released.", (0, 0)),
    ],
    "Arrest": [
        (4, "Police arrested {n} activists in {loc}.", (0, 0)),
        (3, "{org2} forces detained a journalist at a checkpoint near {loc}.", (0, 0)),
        (3, "Security forces captured a senior {org} commander in {loc}.", (0, 0)),
        (1, "Authorities rounded up dozens of traders in the {loc} market.", (0, 0)),
        (2, "Soldiers arrested two men suspected of smuggling near {loc}.", (0, 0)),
    ],
    "Looting": [
        (4, "Armed men looted shops and stole livestock in {loc}.", (0, 0)),
        (3, "{org} fighters raided the market in {loc} and seized goods.", (0, 0)),
        (2, "Bandits robbed traders on the road between {loc} and {loc2}.", (0, 0)),
        (2, "A warehouse in {loc} was looted overnight.", (0, 0)),
        (1, "Youths made away with goods from a depot in {loc}.", (0, 0)),
    ],
    "Protest": [
        (4, "Residents protested against fuel prices in {loc}.", (0, 0)),
        (3, "Hundreds marched in {loc} demanding better wages.", (0, 0)),
        (2, "Students rallied outside the university in {loc}.", (0, 0)),
        (2, "Workers demonstrated in front of the {org} offices in {loc}.", (0, 0)),
        (2, "Police dispersed demonstrators with tear gas in {loc}; several were arrested.", (0, 1)),
        (1, "Crowds gathered outside the governor's office in {loc} chanting slogans.", (0, 0)),
        (2, "Several demonstrators were injured during a protest in {loc}.", (0, 0)),
        (1, "Unrest was reported in {loc} after {org} moved into the area.", (0, 0)),
    ],
    "Battle": [
        (4, "{org} clashed with government forces near {loc}.", (0, 4)),
        (3, "Heavy fighting erupted between {org} and {org2} around {loc}.", (0, 6)),
        (3, "{org} fighters attacked an army post in {loc}, killing {n} soldiers.", None),
        (2, "An army patrol was ambushed by {org} fighters near {loc}.", (0, 3)),
        (2, "Government troops and {org} exchanged fire near {loc}; two soldiers were wounded.", (0, 2)),
        (1, "{org} overran a military outpost close to {loc}.", (0, 2)),
        (1, "Unrest was reported in {loc} after {org} moved into the area.", (0, 1)),
    ],
}

# fixed showcase records exercised by tests and the docs
SHOWCASE = [
    ("demo-injured", "Several demonstrators were injured.", "Protest", 0),
    ("demo-kidnap", "Two men were kidnapped by rebels.", "Kidnapping", 0),
    (
        "demo-multi",
        "The militants clashed with Northern Front and killed one soldier and a "
        "civilian driver, abducted one person, burned a vehicle and seized "
        "livestock near Tessit.",
        "Battle",
        2,
    ),
]


def _country_of(loc: str) -> str:
    return COUNTRIES[LOCATIONS.index(loc) % len(COUNTRIES)]


def _render(rng: random.Random, text: str) -> tuple[str, dict]:
    loc, loc2 = rng.sample(LOCATIONS, 2)
    org, org2 = rng.sample(ORGS, 2)
    n_word = rng.choice(sorted(_NUMBER_WORDS))
    rendered = text.format(org=org, org2=org2, loc=loc, loc2=loc2, n=n_word)
    return rendered, {"loc": loc, "n": _NUMBER_WORDS[n_word]}


def make_corpus(n: int, seed: int, start: date = date(2019, 1, 1),
                days: int = 1095, showcase: bool = False) -> list[EventRecord]:
    """Deterministic labeled corpus of ``n`` events, balanced across types."""
    rng = random.Random(seed)
    labels = sorted(PATTERNS)
    records: list[EventRecord] = []

    if showcase:
        for sid, text, label, fatalities in SHOWCASE:
            records.append(
                EventRecord(
                    id=sid, description=text, label=label, fatalities=fatalities,
                    date=start + timedelta(days=rng.randrange(days)),
                    region=COUNTRIES[0], country=COUNTRIES[0],
                )
            )

    while len(records) < n:
        label = labels[len(records) % len(labels)]
        weights, texts, ranges = zip(*PATTERNS[label])
        idx = rng.choices(range(len(texts)), weights=weights)[0]
        rendered, info = _render(rng, texts[idx])
        fatal_range = ranges[idx]
        fatalities = info["n"] if fatal_range is None else rng.randint(*fatal_range)
        country = _country_of(info["loc"])
        records.append(
            EventRecord(
                id=f"ev-{seed}-{len(records):04d}",
                description=rendered,
                label=label,
                fatalities=fatalities,
                date=start + timedelta(days=rng.randrange(days)),
                region=country,
                country=country,
            )
        )
    return records


def corpus_to_csv(records: list[EventRecord], path: str | Path,
                  note_fraction: float = 0.1, seed: int = 7) -> None:
    """Write records as a delimited table, salting in annotator notes that the
    reader is expected to strip."""
    rng = random.Random(seed)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "description", "label", "fatalities", "date", "region", "country"])
        for r in records:
            description = r.description
            if rng.random() < note_fraction:
                description += " [size: no report]"
            writer.writerow(
                [r.id, description, r.label, r.fatalities,
                 r.date.isoformat() if r.date else "", r.region or "", r.country or ""]
            )


DEMO_SEED = 20240601
BENCHMARK_SEED = 20240602
DATA_DIR = Path(__file__).parent / "data" / "corpora"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    corpus_to_csv(make_corpus(120, DEMO_SEED, showcase=True), DATA_DIR / "demo_corpus.csv")
    corpus_to_csv(make_corpus(800, BENCHMARK_SEED), DATA_DIR / "benchmark_corpus.csv")
    print(f"wrote corpora under {DATA_DIR}")


if __name__ == "__main__":
    main()
