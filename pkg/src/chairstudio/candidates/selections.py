"""Named selection sets with optimistic-concurrency revisions.

A selection is a shortlist of candidate ids with a star rating and a
free-text note each. Every accepted mutation bumps the revision by
exactly one; a mutation carrying a stale expected revision is rejected
with the current revision so the caller can rebase. Last-writer-wins is
deliberately impossible.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from ..errors import ConfigError, NotFound, RevisionConflict

MAX_RATING = 5


@dataclass(frozen=True)
class SelectionEntry:
    rating: int = 0
    note: str = ""

    def __post_init__(self) -> None:
        if not 0 <= self.rating <= MAX_RATING:
            raise ConfigError(f"rating must be in 0..{MAX_RATING}, got {self.rating}")
        if not isinstance(self.note, str):
            raise ConfigError("note must be a string")


@dataclass
class SelectionSet:
    name: str
    revision: int = 0
    entries: dict[str, SelectionEntry] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "revision": self.revision,
            "entries": {
                cid: {"rating": e.rating, "note": e.note}
                for cid, e in sorted(self.entries.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionSet":
        return cls(
            name=d["name"],
            revision=d["revision"],
            entries={
                cid: SelectionEntry(rating=v["rating"], note=v.get("note", ""))
                for cid, v in d.get("entries", {}).items()
            },
        )


def _validate_name(name: str) -> str:
    if not name or not all(c.isalnum() or c in "-_" for c in name):
        raise ConfigError(
            f"selection name must be non-empty and use [a-zA-Z0-9_-], got {name!r}"
        )
    return name


class SelectionStore:
    """Directory-backed selection sets; mutations serialized per name.

    `known_ids` lets the store reject references to candidates that do
    not exist in the catalog it accompanies.
    """

    def __init__(self, directory: str | Path, known_ids: Callable[[str], bool] | None = None):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.known_ids = known_ids
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, name: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(name, threading.Lock())

    def _path(self, name: str) -> Path:
        return self.directory / f"{_validate_name(name)}.json"

    def list_names(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def load(self, name: str) -> SelectionSet:
        """The named set; a never-written name is an empty set at revision 0."""
        path = self._path(name)
        if not path.exists():
            return SelectionSet(name=name)
        return SelectionSet.from_dict(json.loads(path.read_text()))

    def mutate(
        self,
        name: str,
        expected_revision: int,
        set_entries: dict[str, SelectionEntry] | None = None,
        remove_ids: Iterable[str] | None = None,
    ) -> SelectionSet:
        """Apply upserts and removals atomically; returns the new set.

        Raises RevisionConflict (carrying the current revision) when
        expected_revision is stale, and NotFound when any referenced id
        is not in the catalog — in both cases the stored set is
        untouched.
        """
        set_entries = set_entries or {}
        remove_ids = list(remove_ids or [])
        with self._lock(name):
            current = self.load(name)
            if expected_revision != current.revision:
                raise RevisionConflict(
                    f"selection {name!r} is at revision {current.revision}, "
                    f"mutation expected {expected_revision}",
                    current_revision=current.revision,
                )
            if self.known_ids is not None:
                for cid in [*set_entries, *remove_ids]:
                    if not self.known_ids(cid):
                        raise NotFound(f"candidate {cid!r} is not in the catalog")
            entries = dict(current.entries)
            entries.update(set_entries)
            for cid in remove_ids:
                entries.pop(cid, None)
            updated = SelectionSet(name=name, revision=current.revision + 1, entries=entries)
            tmp = self._path(name).with_suffix(".json.tmp")
            tmp.write_text(json.dumps(updated.to_dict(), sort_keys=True, indent=2) + "\n")
            tmp.replace(self._path(name))
            return updated
