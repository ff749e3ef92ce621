"""Input profiling and representative sampling.

Inputs are grouped by a syntactic signature (the sequence of maximal
character-class runs, run lengths dropped) and sampled round-robin across
groups, so every input shape present in a corpus is represented even when
shapes are heavily imbalanced.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["InputCorpus", "Profile", "profile", "representative_sample"]

_PROFILE_CLASSES: tuple[tuple[str, object], ...] = (
    ("Digit", str.isdigit),
    ("Alpha", str.isalpha),
    ("Space", str.isspace),
    ("Slash", lambda c: c == "/"),
    ("Dash", lambda c: c == "-"),
    ("Comma", lambda c: c == ","),
    ("Dot", lambda c: c == "."),
    ("Colon", lambda c: c == ":"),
)


@dataclass(frozen=True)
class InputCorpus:
    """The explicit enumeration of inputs the final program must handle."""

    inputs: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ValueError("corpus must be nonempty")

    def __len__(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class Profile:
    """Class skeleton of a string: one symbol per maximal run."""

    signature: tuple[str, ...]


def _class_of(ch: str) -> str:
    for name, pred in _PROFILE_CLASSES:
        if pred(ch):  # type: ignore[operator]
            return name
    return "Other"


def profile(text: str) -> Profile:
    """Sequence of run classes; '06/08/2010' -> Digit Slash Digit Slash Digit."""
    runs: list[str] = []
    for ch in text:
        cls = _class_of(ch)
        if not runs or runs[-1] != cls:
            runs.append(cls)
    return Profile(tuple(runs))


def representative_sample(corpus: InputCorpus, n: int = 20) -> list[str]:
    """Up to n distinct inputs covering every profile group in the corpus.

    Deterministic: groups are visited round-robin in first-appearance order
    and each group yields its earliest inputs first.  When n is at least the
    number of groups, every group contributes.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    seen: set[str] = set()
    groups: dict[Profile, list[str]] = {}
    for text in corpus.inputs:
        if text in seen:
            continue
        seen.add(text)
        groups.setdefault(profile(text), []).append(text)

    sample: list[str] = []
    queues = list(groups.values())
    limit = min(n, len(seen))
    cursor = [0] * len(queues)
    while len(sample) < limit:
        for gi, queue in enumerate(queues):
            if len(sample) >= limit:
                break
            if cursor[gi] < len(queue):
                sample.append(queue[cursor[gi]])
                cursor[gi] += 1
    return sample
