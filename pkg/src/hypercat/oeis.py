"""OEIS b-file handling and verification of computed terms.

A b-file is plain text with one ``index value`` pair per line. Sequences that
list only the nonzero terms of a (p-1)-periodic family need an index map: the
registry stores, for each id, the first b-file index and the stride in ``n``
between consecutive entries.
"""
from __future__ import annotations

import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from hypercat.core import HypercatError, Params
from hypercat.exact import closed_term

CACHE_ENV = "HYPERCAT_OEIS_CACHE"
_ID = re.compile(r"^A[0-9]{6}$")


class ParseError(HypercatError, ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NotCachedOffline(HypercatError):
    pass


class FetchFailed(HypercatError):
    def __init__(self, status, url: str):
        super().__init__(f"fetching {url} failed with status {status}")
        self.status = status


@dataclass(frozen=True)
class BFile:
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for (a, _), (b, _) in zip(self.entries, self.entries[1:]):
            if b <= a:
                raise ValueError(f"b-file indices must increase strictly ({a} then {b})")
        if any(v < 0 for _, v in self.entries):
            raise ValueError("b-file values must be nonnegative")

    def __len__(self):
        return len(self.entries)

    def values(self) -> list[int]:
        return [v for _, v in self.entries]


def parse_bfile(text: str) -> BFile:
    entries = []
    last = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(lineno, f"expected 'index value', got {raw!r}")
        try:
            index, value = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer field in {raw!r}") from None
        if value < 0:
            raise ParseError(lineno, "negative value")
        if last is not None and index <= last:
            raise ParseError(lineno, f"index {index} does not increase")
        last = index
        entries.append((index, value))
    return BFile(tuple(entries))


def serialize_bfile(bfile: BFile) -> str:
    return "".join(f"{i} {v}\n" for i, v in bfile.entries)


@dataclass(frozen=True)
class SequenceRef:
    """An OEIS (or local) sequence together with its index convention.

    Entry ``k`` of the b-file is C_{d,p}(n) with ``n = 1 + (k - first_index) * stride``;
    ``stride`` is 1 when zeros are listed and ``p - 1`` when only nonzero terms are.
    """

    id: str
    params: Params
    first_index: int = 1
    nonzero_only: bool = False
    local: bool = False
    enabled: bool = True
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.local and not _ID.match(self.id):
            raise ValueError(f"bad OEIS id {self.id!r}")

    @property
    def stride(self) -> int:
        return self.params.p - 1 if self.nonzero_only else 1

    def n_for(self, k: int) -> int:
        return 1 + (k - self.first_index) * self.stride

    @property
    def filename(self) -> str:
        return f"b{self.id[1:]}.txt" if not self.local else f"b{self.id}.txt"

    @property
    def url(self) -> str:
        return f"https://oeis.org/{self.id}/{self.filename}"


REGISTRY: dict[str, SequenceRef] = {
    ref.id: ref for ref in [
        SequenceRef("A000108", Params(1, 2), first_index=0),
        SequenceRef("A236339", Params(2, 2)),
        SequenceRef("A236342", Params(3, 2)),
        SequenceRef("A322543", Params(2, 3), nonzero_only=True),
        SequenceRef("LOCAL33", Params(3, 3), nonzero_only=True, local=True,
                    note="(3,3) terms with zeros omitted; not in the OEIS"),
    ] + [
        # p=2, d=4..10: eight candidate ids for seven values of d; the pairing is a guess
        # until checked against downloaded b-files, so these rows stay disabled
        SequenceRef(f"A2370{19 + i}", Params(4 + i, 2), enabled=False, note="unconfirmed id/d pairing")
        for i in range(7)
    ]
}


def fixture_dir() -> Path:
    """Directory of the b-files shipped with the package."""
    return Path(str(resources.files("hypercat") / "data"))


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    from platformdirs import user_cache_dir

    return Path(user_cache_dir()) / "hypercat"


def fetch_bfile(ref: SequenceRef, cache_dir: str | os.PathLike | None = None, *, offline: bool = True,
                fallback_dirs=(), timeout: float = 30.0) -> BFile:
    """Load the b-file for ``ref`` from the cache, downloading it when allowed.

    ``fallback_dirs`` are read-only directories consulted after ``cache_dir``
    (the shipped fixtures, typically). Downloads are written to a temporary file
    and renamed into place, so concurrent callers never see a partial file.
    """
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    for directory in (cache, *map(Path, fallback_dirs)):
        path = directory / ref.filename
        if path.is_file():
            return parse_bfile(path.read_text())
    if offline or ref.local:
        raise NotCachedOffline(f"{ref.filename} is not cached in {cache} and network use is off")
    try:
        with urllib.request.urlopen(ref.url, timeout=timeout) as resp:
            status = getattr(resp, "status", 200)
            if status != 200:
                raise FetchFailed(status, ref.url)
            data = resp.read()
    except urllib.error.HTTPError as exc:
        raise FetchFailed(exc.code, ref.url) from exc
    except urllib.error.URLError as exc:
        raise FetchFailed(str(exc.reason), ref.url) from exc
    bfile = parse_bfile(data.decode("utf-8"))
    cache.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cache, prefix=ref.filename, suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, cache / ref.filename)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return bfile


def verify_sequence(ref: SequenceRef, bfile: BFile, max_terms: int | None = None, term=closed_term) -> dict:
    """Compare b-file entries with computed terms; mismatches are reported, not raised.

    The report's ``index_map_ok`` is false when the first entry does not map to
    ``n = 1`` with value 1, which indicates a misconfigured index convention.
    """
    entries = bfile.entries if max_terms is None else bfile.entries[:max_terms]
    mismatches = []
    for k, expected in entries:
        n = ref.n_for(k)
        computed = term(ref.params, n) if n >= 1 else None
        if computed != expected:
            mismatches.append({"k": k, "n": n, "expected": str(expected),
                               "computed": None if computed is None else str(computed)})
    first_ok = bool(entries) and ref.n_for(entries[0][0]) == 1 and entries[0][1] == 1
    return {
        "id": ref.id,
        "d": ref.params.d,
        "p": ref.params.p,
        "checked": len(entries),
        "matched": len(entries) - len(mismatches),
        "mismatches": mismatches,
        "index_map_ok": first_ok,
    }
