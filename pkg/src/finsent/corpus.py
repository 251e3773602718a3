"""Headline records, file ingestion, preprocessing and augmentation mappers.

Scores live on the task's [-1, 1] scale: -1 is very bearish, 0 neutral and
+1 very bullish. Everything here is immutable once constructed.
"""

from __future__ import annotations

import io
import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from finsent.exceptions import ParseError, ValidationError

__all__ = [
    "HeadlineRecord",
    "Dataset",
    "RatingReview",
    "PhrasebankEntry",
    "DEFAULT_PLACEHOLDER",
    "load_headlines",
    "read_headlines",
    "dump_headlines",
    "mask_company",
    "tokenize",
    "map_star_rating",
    "map_phrasebank_label",
    "load_ratings",
    "ratings_to_dataset",
    "load_phrasebank",
    "phrasebank_to_dataset",
    "merge_datasets",
]

DEFAULT_PLACEHOLDER = "_ORG_"

PHRASEBANK_LABELS = ("positive", "neutral", "negative")
PHRASEBANK_POSITIVE_GRID = (1.0, 0.5)
PHRASEBANK_NEGATIVE_GRID = (-1.0, -0.5)

Source = Union[bytes, str, IO[bytes], IO[str]]


@dataclass(frozen=True)
class HeadlineRecord:
    """One scored (or unscored) headline."""

    id: str
    company: str
    title: str
    sentiment: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError(f"record id must be a non-empty string, got {self.id!r}")
        if not isinstance(self.title, str) or not self.title.strip():
            raise ValidationError(f"record {self.id!r}: title is empty")
        if not isinstance(self.company, str):
            raise ValidationError(f"record {self.id!r}: company must be a string")
        if self.sentiment is not None:
            if isinstance(self.sentiment, bool) or not isinstance(self.sentiment, (int, float)):
                raise ValidationError(f"record {self.id!r}: sentiment must be a number")
            s = float(self.sentiment)
            if not math.isfinite(s) or not -1.0 <= s <= 1.0:
                raise ValidationError(
                    f"record {self.id!r}: sentiment {self.sentiment!r} outside [-1, 1]"
                )
            object.__setattr__(self, "sentiment", s)

    def to_dict(self) -> dict:
        out = {"id": self.id, "company": self.company, "title": self.title}
        if self.sentiment is not None:
            out["sentiment"] = self.sentiment
        return out


@dataclass(frozen=True)
class Dataset:
    """Ordered, id-unique collection of headline records."""

    records: tuple = ()
    provenance: str = "semeval-train"
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        records = tuple(self.records)
        index = {}
        for pos, rec in enumerate(records):
            if not isinstance(rec, HeadlineRecord):
                raise ValidationError(f"element {pos} is not a HeadlineRecord")
            if rec.id in index:
                raise ValidationError(f"duplicate record id {rec.id!r}")
            index[rec.id] = pos
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[HeadlineRecord]:
        return iter(self.records)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Dataset(self.records[item], self.provenance)
        return self.records[item]

    def __contains__(self, record_id) -> bool:
        return record_id in self._index

    def get(self, record_id: str) -> Optional[HeadlineRecord]:
        pos = self._index.get(record_id)
        return None if pos is None else self.records[pos]

    @property
    def ids(self) -> list:
        return [r.id for r in self.records]

    @property
    def sentiments(self) -> list:
        return [r.sentiment for r in self.records]

    def unscored_ids(self) -> list:
        return [r.id for r in self.records if r.sentiment is None]

    def subset(self, positions: Iterable[int]) -> "Dataset":
        return Dataset([self.records[i] for i in positions], self.provenance)


@dataclass(frozen=True)
class RatingReview:
    text: str
    stars: int

    def __post_init__(self):
        if isinstance(self.stars, bool) or not isinstance(self.stars, int) or not 1 <= self.stars <= 5:
            raise ValidationError(f"stars must be an integer in 1..5, got {self.stars!r}")


@dataclass(frozen=True)
class PhrasebankEntry:
    text: str
    label: str

    def __post_init__(self):
        if self.label not in PHRASEBANK_LABELS:
            raise ValidationError(
                f"label must be one of {PHRASEBANK_LABELS}, got {self.label!r}"
            )


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            return bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    return source


def load_headlines(source: Source, format: str = "json", provenance: str = "semeval-train") -> Dataset:
    """Parse a JSON array of headline objects into a :class:`Dataset`.

    Parameters
    ----------
    source : bytes, str or readable stream
        UTF-8 JSON content: ``[{"id", "company", "title", "sentiment"?}, ...]``.
    format : {"json"}
        Only JSON is supported.
    provenance : str
        Tag stored on the returned dataset.

    Raises
    ------
    ParseError
        Malformed JSON, or an element that is not an object with the
        required string fields. The message names the element index.
    ValidationError
        Sentiment outside [-1, 1] (names the id) or duplicate ids.
    """
    if format != "json":
        raise ValueError(f"unsupported format {format!r}")
    text = _read_text(source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise ParseError("expected a JSON array of headline objects")

    records = []
    for pos, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ParseError(f"element {pos}: expected an object, got {type(item).__name__}")
        for key in ("id", "company", "title"):
            if not isinstance(item.get(key), str):
                raise ParseError(f"element {pos}: field {key!r} missing or not a string")
        sentiment = item.get("sentiment")
        if sentiment is not None and (isinstance(sentiment, bool) or not isinstance(sentiment, (int, float))):
            raise ParseError(f"element {pos}: sentiment is not a number")
        records.append(HeadlineRecord(item["id"], item["company"], item["title"], sentiment))
    return Dataset(records, provenance)


def read_headlines(path, provenance: str = "semeval-train") -> Dataset:
    with open(path, "rb") as fh:
        return load_headlines(fh, provenance=provenance)


def dump_headlines(dataset: Iterable[HeadlineRecord]) -> str:
    """Serialize records back to canonical headline JSON."""
    return json.dumps([r.to_dict() for r in dataset], ensure_ascii=False, indent=2) + "\n"


def _company_pattern(company: str) -> re.Pattern:
    # hyphen counts as part of a word: "bp-linked" is one word, not "bp"
    body = r"\s+".join(re.escape(part) for part in company.split())
    return re.compile(rf"(?<![\w-]){body}(?![\w-])", re.IGNORECASE)


def mask_company(record: HeadlineRecord, placeholder: str = DEFAULT_PLACEHOLDER) -> HeadlineRecord:
    """Replace whole-word, case-insensitive mentions of ``record.company``.

    >>> r = HeadlineRecord("1", "Glencore", "Glencore shares rise")
    >>> mask_company(r).title
    '_ORG_ shares rise'
    """
    if not record.company.strip():
        return record
    title = _company_pattern(record.company).sub(lambda _: placeholder, record.title)
    if title == record.title:
        return record
    return replace(record, title=title)


_TOKEN_RE = re.compile(r"\w+")


def tokenize(text: str) -> list:
    """Lowercase ``text`` and split it into runs of Unicode word characters.

    Underscore counts as a letter so the masking placeholder survives as a
    single token.
    """
    return _TOKEN_RE.findall(text.lower())


def map_star_rating(stars: int) -> float:
    """Map a 1-5 star rating linearly onto [-1, 1]: ``(stars - 3) / 2``."""
    if isinstance(stars, bool) or not isinstance(stars, int) or not 1 <= stars <= 5:
        raise ValidationError(f"stars must be an integer in 1..5, got {stars!r}")
    return (stars - 3) / 2.0


def map_phrasebank_label(
    label: str,
    positive_value: float = 1.0,
    negative_value: float = -1.0,
    unchecked: bool = False,
) -> float:
    """Score a three-class phrasebank label.

    Neutral is always 0. Unless ``unchecked`` is set, the positive and
    negative values must come from the grids {1, 0.5} and {-1, -0.5}.
    """
    if label not in PHRASEBANK_LABELS:
        raise ValidationError(f"unknown phrasebank label {label!r}")
    if not unchecked:
        if positive_value not in PHRASEBANK_POSITIVE_GRID:
            raise ValidationError(
                f"positive_value {positive_value} not in {PHRASEBANK_POSITIVE_GRID}; pass unchecked=True to override"
            )
        if negative_value not in PHRASEBANK_NEGATIVE_GRID:
            raise ValidationError(
                f"negative_value {negative_value} not in {PHRASEBANK_NEGATIVE_GRID}; pass unchecked=True to override"
            )
    if label == "neutral":
        return 0.0
    return float(positive_value if label == "positive" else negative_value)


def load_ratings(source: Source, limit: Optional[int] = None) -> list:
    """Read JSON-lines ``{"text", "stars"}`` reviews, stopping after ``limit``."""
    reviews = []
    for lineno, line in enumerate(io.StringIO(_read_text(source)), start=1):
        if limit is not None and len(reviews) >= limit:
            break
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: {exc.msg}") from exc
        if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
            raise ParseError(f"line {lineno}: expected an object with a string 'text'")
        reviews.append(RatingReview(obj["text"], obj.get("stars")))
    return reviews


def ratings_to_dataset(reviews: Sequence[RatingReview], provenance: str = "ratings-augment") -> Dataset:
    records = [
        HeadlineRecord(str(i), "", r.text, map_star_rating(r.stars))
        for i, r in enumerate(reviews)
        if r.text.strip()
    ]
    return Dataset(records, provenance)


def load_phrasebank(source: Source, delimiter: str = "@") -> list:
    """Read ``sentence<delimiter>label`` lines (split on the last delimiter)."""
    entries = []
    for lineno, line in enumerate(io.StringIO(_read_text(source)), start=1):
        line = line.strip()
        if not line:
            continue
        text, sep, label = line.rpartition(delimiter)
        if not sep:
            raise ParseError(f"line {lineno}: missing {delimiter!r} delimiter")
        entries.append(PhrasebankEntry(text.strip(), label.strip().lower()))
    return entries


def phrasebank_to_dataset(
    entries: Sequence[PhrasebankEntry],
    positive_value: float = 1.0,
    negative_value: float = -1.0,
    unchecked: bool = False,
    provenance: str = "phrasebank-augment",
) -> Dataset:
    records = [
        HeadlineRecord(
            str(i), "", e.text, map_phrasebank_label(e.label, positive_value, negative_value, unchecked)
        )
        for i, e in enumerate(entries)
        if e.text.strip()
    ]
    return Dataset(records, provenance)


def merge_datasets(base: Dataset, augment: Dataset) -> Dataset:
    """Concatenate ``base`` then ``augment``; augment ids become ``<provenance>/<id>``."""
    if not len(augment):
        return Dataset(base.records, base.provenance)
    extra = [replace(r, id=f"{augment.provenance}/{r.id}") for r in augment]
    return Dataset(list(base.records) + extra, f"{base.provenance}+{augment.provenance}")
