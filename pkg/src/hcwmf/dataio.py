"""Record ingestion, time binning, serialization, and synthetic corpora.

Adoption events travel as newline-delimited JSON objects with fields
"user", "hashtag", and integer "ts" (seconds).  Binning turns the events of
one hashtag into a binary user-by-time matrix.  The synthetic generator
produces seeded corpora whose shape mimics a trending hashtag: adoption
onsets concentrated early, re-adoption probability decaying afterwards.
"""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import SparseBinaryMatrix

__all__ = [
    "AdoptionRecords",
    "SynthConfig",
    "parse_records",
    "write_records",
    "bin_records",
    "generate_synthetic",
    "generate_corpus",
    "cumulative_counts",
    "save_matrix_csv",
    "load_matrix_csv",
    "save_cumulative_csv",
]


@dataclass(frozen=True)
class AdoptionRecords:
    """Immutable sequence of (user_id, hashtag, timestamp-in-seconds) events."""

    events: tuple[tuple[str, str, int], ...]

    def __post_init__(self):
        for ev in self.events:
            if len(ev) != 3:
                raise ValueError(f"event must be (user, hashtag, ts), got {ev!r}")
            user, hashtag, ts = ev
            if not isinstance(user, str) or not user:
                raise ValueError(f"user id must be a non-empty string, got {user!r}")
            if not isinstance(hashtag, str) or not hashtag:
                raise ValueError(f"hashtag must be a non-empty string, got {hashtag!r}")
            if isinstance(ts, bool) or not isinstance(ts, int) or ts < 0:
                raise ValueError(f"timestamp must be a non-negative integer, got {ts!r}")

    @classmethod
    def of(cls, events) -> "AdoptionRecords":
        return cls(tuple((u, h, int(t)) for u, h, t in events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic trending-hashtag generator.

    ``trend_decay`` is the success rate of the geometric draw for the
    first-adoption bin (larger means onsets pile up earlier); after onset,
    bin k is adopted with probability
    ``repeat_prob * exp(-repeat_decay * (k - onset - 1))``.
    """

    n_users: int
    n_bins: int
    trend_decay: float = 0.1
    repeat_prob: float = 0.5
    repeat_decay: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if self.n_bins < 2:
            raise ValueError(f"n_bins must be >= 2, got {self.n_bins}")
        if not 0.0 < self.trend_decay <= 1.0:
            raise ValueError(f"trend_decay must be in (0, 1], got {self.trend_decay}")
        if not 0.0 <= self.repeat_prob <= 1.0:
            raise ValueError(f"repeat_prob must be in [0, 1], got {self.repeat_prob}")
        if self.repeat_decay < 0:
            raise ValueError(f"repeat_decay must be >= 0, got {self.repeat_decay}")


def parse_records(stream) -> tuple[AdoptionRecords, int]:
    """Read newline-delimited JSON events; returns (records, skipped count).

    Accepts a text or byte stream (anything iterable by line).  Lines that
    are not valid JSON objects with string "user"/"hashtag" and non-negative
    integer "ts" are skipped with a warning and counted, never silently
    dropped.  Blank lines are ignored without counting.
    """
    try:
        lines = iter(stream)
    except TypeError:
        raise ValueError(f"stream is not readable line by line: {stream!r}") from None
    events = []
    skipped = 0
    for lineno, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                warnings.warn(f"line {lineno}: not valid UTF-8, skipped", stacklevel=2)
                skipped += 1
                continue
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            warnings.warn(f"line {lineno}: not valid JSON, skipped", stacklevel=2)
            skipped += 1
            continue
        if (
            not isinstance(obj, dict)
            or not isinstance(obj.get("user"), str)
            or not obj.get("user")
            or not isinstance(obj.get("hashtag"), str)
            or not obj.get("hashtag")
            or isinstance(obj.get("ts"), bool)
            or not isinstance(obj.get("ts"), int)
            or obj["ts"] < 0
        ):
            warnings.warn(f"line {lineno}: malformed record, skipped", stacklevel=2)
            skipped += 1
            continue
        events.append((obj["user"], obj["hashtag"], obj["ts"]))
    return AdoptionRecords(tuple(events)), skipped


def write_records(records: AdoptionRecords, path) -> None:
    """Write events as newline-delimited JSON, one object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for user, hashtag, ts in records:
            fh.write(json.dumps({"user": user, "hashtag": hashtag, "ts": ts}, separators=(",", ":")))
            fh.write("\n")


def bin_records(
    records: AdoptionRecords, hashtag: str, bin_seconds: int = 3600, m: int | None = None
) -> SparseBinaryMatrix:
    """Bin one hashtag's events into a binary user-by-time matrix.

    The bin origin is the minimum timestamp of the whole corpus, so matrices
    for different hashtags of the same corpus share a time axis.  Rows follow
    sorted user ids.  When ``m`` is omitted it defaults to the largest
    occupied bin plus 25% headroom; an explicit ``m`` must exceed the largest
    occupied bin index.
    """
    if bin_seconds <= 0:
        raise ValueError(f"bin_seconds must be > 0, got {bin_seconds}")
    if len(records) == 0:
        raise ValueError("cannot bin an empty record set")
    min_ts = min(ts for _, _, ts in records)
    tagged = [(user, ts) for user, h, ts in records if h == hashtag]
    if not tagged:
        raise ValueError(f"no events for hashtag {hashtag!r}")
    users = sorted({user for user, _ in tagged})
    row_of = {u: i for i, u in enumerate(users)}
    cells = {(row_of[u], (ts - min_ts) // bin_seconds) for u, ts in tagged}
    max_bin = max(c for _, c in cells)
    if m is None:
        m = math.ceil(1.25 * (max_bin + 1))
    elif m <= max_bin:
        raise ValueError(
            f"m={m} is too small: largest occupied bin is {max_bin}, need m >= {max_bin + 1}"
        )
    return SparseBinaryMatrix(len(users), m, cells)


def _user_ids(n_users: int) -> list[str]:
    width = len(str(n_users - 1))
    return [f"u{i:0{width}d}" for i in range(n_users)]


def _emit_user_events(rng, cfg: SynthConfig, scale: float) -> list[int]:
    """Adopted bin indices for one user; ``scale`` multiplies repeat_prob."""
    onset = min(int(rng.geometric(cfg.trend_decay)) - 1, cfg.n_bins - 1)
    bins = [onset]
    for k in range(onset + 1, cfg.n_bins):
        p = scale * cfg.repeat_prob * math.exp(-cfg.repeat_decay * (k - onset - 1))
        if rng.random() < p:
            bins.append(k)
    return bins


def generate_synthetic(
    cfg: SynthConfig, hashtag: str = "h0", bin_seconds: int = 3600
) -> AdoptionRecords:
    """Seeded single-hashtag corpus: every user adopts once, then re-adopts
    with a per-bin probability that decays after onset."""
    rng = np.random.default_rng(cfg.seed)
    events = []
    for uid in _user_ids(cfg.n_users):
        for b in _emit_user_events(rng, cfg, scale=1.0):
            events.append((uid, hashtag, b * bin_seconds))
    return AdoptionRecords(tuple(events))


def generate_corpus(
    cfg: SynthConfig,
    n_hashtags: int,
    participation: float = 0.35,
    bin_seconds: int = 3600,
) -> AdoptionRecords:
    """Seeded multi-hashtag corpus over a shared user pool.

    Each user gets a consistency propensity drawn once from [0.5, 1.0) and
    reused for every hashtag, so users who repeat do so across the corpus.
    Per hashtag, each user participates with the given probability; when they
    do, their events follow the single-hashtag scheme with repeat_prob scaled
    by their propensity.  Hashtag streams use seeds derived from cfg.seed, so
    the corpus is reproducible from one integer.
    """
    if n_hashtags < 1:
        raise ValueError(f"n_hashtags must be >= 1, got {n_hashtags}")
    if not 0.0 < participation <= 1.0:
        raise ValueError(f"participation must be in (0, 1], got {participation}")
    master = np.random.default_rng(cfg.seed)
    propensity = master.uniform(0.5, 1.0, size=cfg.n_users)
    uids = _user_ids(cfg.n_users)
    tag_width = len(str(n_hashtags - 1))
    events = []
    for t in range(n_hashtags):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1 + t]))
        tag = f"h{t:0{tag_width}d}"
        for i, uid in enumerate(uids):
            if rng.random() >= participation:
                continue
            for b in _emit_user_events(rng, cfg, scale=float(propensity[i])):
                events.append((uid, tag, b * bin_seconds))
    return AdoptionRecords(tuple(events))


def cumulative_counts(
    records: AdoptionRecords, bin_seconds: int = 3600
) -> list[tuple[int, int, int]]:
    """Per-bin cumulative totals: (bin, events so far, distinct users so far)."""
    if bin_seconds <= 0:
        raise ValueError(f"bin_seconds must be > 0, got {bin_seconds}")
    if len(records) == 0:
        raise ValueError("cannot accumulate an empty record set")
    min_ts = min(ts for _, _, ts in records)
    events_in: dict[int, int] = {}
    first_bin: dict[str, int] = {}
    for user, _, ts in records:
        b = (ts - min_ts) // bin_seconds
        events_in[b] = events_in.get(b, 0) + 1
        if user not in first_bin or b < first_bin[user]:
            first_bin[user] = b
    new_users_in: dict[int, int] = {}
    for b in first_bin.values():
        new_users_in[b] = new_users_in.get(b, 0) + 1
    out = []
    cum_events = 0
    cum_users = 0
    for b in range(max(events_in) + 1):
        cum_events += events_in.get(b, 0)
        cum_users += new_users_in.get(b, 0)
        out.append((b, cum_events, cum_users))
    return out


def save_matrix_csv(matrix: SparseBinaryMatrix, path) -> None:
    """Serialize as coordinate triplets under a two-line N/M header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"N,{matrix.rows}\n")
        fh.write(f"M,{matrix.cols}\n")
        for r, c in sorted(matrix.entries):
            fh.write(f"{r},{c},1\n")


def load_matrix_csv(path) -> SparseBinaryMatrix:
    """Inverse of save_matrix_csv, validating the header and triplet values."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("N,") or not lines[1].startswith("M,"):
        raise ValueError(f"{path}: expected 'N,<rows>' and 'M,<cols>' header lines")
    n = int(lines[0][2:])
    m = int(lines[1][2:])
    cells = []
    for ln in lines[2:]:
        parts = ln.split(",")
        if len(parts) != 3 or parts[2] != "1":
            raise ValueError(f"{path}: malformed triplet line {ln!r}")
        cells.append((int(parts[0]), int(parts[1])))
    return SparseBinaryMatrix(n, m, cells)


def save_cumulative_csv(rows, path) -> None:
    """Write cumulative_counts output as CSV with a bin,tweets,users header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin,tweets,users\n")
        for b, tweets, users in rows:
            fh.write(f"{b},{tweets},{users}\n")
