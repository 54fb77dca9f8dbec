"""On-disk cache of completed rewriting systems, plus the build context that uses it."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BudgetExceeded
from .engine import ENGINE_VERSION, Budget, CompletedSystem, Presentation, complete

log = logging.getLogger(__name__)

CACHE_ENV = "HGSYS_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "hgsys"


def cache_key(pres: Presentation, degree_bound: int) -> str:
    blob = f"{pres.digest()}:{degree_bound}:{ENGINE_VERSION}".encode()
    return hashlib.sha256(blob).hexdigest()


class RuleCache:
    def __init__(self, directory: str | os.PathLike):
        self.dir = Path(directory)
        self.hits = 0
        self.misses = 0

    def path(self, pres: Presentation, degree_bound: int) -> Path:
        return self.dir / f"{cache_key(pres, degree_bound)}.rules"

    def load(self, pres: Presentation, degree_bound: int) -> CompletedSystem | None:
        p = self.path(pres, degree_bound)
        try:
            data = json.loads(p.read_text())
            system = CompletedSystem.from_json(pres, data)
        except FileNotFoundError:
            self.misses += 1
            return None
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring cache entry %s: %s", p.name, exc)
            self.misses += 1
            return None
        if system.degree_bound != degree_bound:
            self.misses += 1
            return None
        self.hits += 1
        return system

    def store(self, system: CompletedSystem) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.path(system.source, system.degree_bound)
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=".tmp-", suffix=".rules")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(system.to_json(), fh, sort_keys=True)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return p


@dataclass
class Context:
    """How presentations get completed: degree bound, budget, optional cache."""

    degree_bound: int = 8
    budget: Budget = field(default_factory=Budget)
    cache: RuleCache | None = None
    strict: bool = True
    _memo: dict = field(default_factory=dict, repr=False)

    def complete(self, pres: Presentation) -> CompletedSystem:
        key = (pres.digest(), self.degree_bound)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        system = self.cache.load(pres, self.degree_bound) if self.cache else None
        # a cached rule set must respect the same rule budget as a fresh completion
        if system is not None and len(system.rules) > self.budget.max_rules:
            raise BudgetExceeded(f"completion of {pres.name} exceeded {self.budget.max_rules} rules")
        if system is None:
            system = complete(pres, self.degree_bound, self.budget)
            log.info("completed %s: %d rules (%d added), %s", pres.name, len(system.rules),
                     system.added, system.status)
            if self.cache:
                self.cache.store(system)
        self._memo[key] = system
        return system
