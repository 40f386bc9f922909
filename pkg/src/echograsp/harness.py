"""Batch experiment runner: subjects x trials, records, and summaries.

Per-trial seeds are derived by hashing (base_seed, subject_id, trial_index)
with SHA-256 so runs are reproducible across processes and platforms.
NEVER use Python's built-in hash() for this: it is salted per process.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import voice
from .agent import AgentParams
from .guidance import Thresholds
from .perception import CameraModel, head_camera, wrist_camera
from .session import SessionConfig, SimSession
from .world import ArenaConfig

CSV_COLUMNS = (
    "subject_id",
    "trial_index",
    "placement_index",
    "seed",
    "t1_s",
    "t2_s",
    "success",
    "fail_reason",
)

MOVING_AVERAGE_WINDOW = 5


@dataclass(frozen=True)
class SubjectConfig:
    id: str
    agent: AgentParams = field(default_factory=AgentParams)

    def to_json_dict(self) -> dict:
        return {"id": self.id, "agent": self.agent.to_json_dict()}


@dataclass(frozen=True)
class ExperimentConfig:
    subjects: tuple[SubjectConfig, ...] = ()
    trials_per_subject: int = 40
    base_seed: int = 0
    arena: ArenaConfig = field(default_factory=ArenaConfig)
    thresholds: Thresholds = field(default_factory=Thresholds)
    head_camera: CameraModel = field(default_factory=head_camera)
    wrist_camera: CameraModel = field(default_factory=wrist_camera)

    def __post_init__(self) -> None:
        if self.trials_per_subject < 1:
            raise ValueError("trials_per_subject must be at least 1")
        ids = [s.id for s in self.subjects]
        if len(ids) != len(set(ids)):
            raise ValueError("subject ids must be unique")

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        kwargs: dict = {}
        if "subjects" in data:
            kwargs["subjects"] = tuple(
                SubjectConfig(id=s["id"], agent=AgentParams.from_json_dict(s.get("agent", {})))
                for s in data["subjects"]
            )
        if "trials_per_subject" in data:
            kwargs["trials_per_subject"] = int(data["trials_per_subject"])
        if "base_seed" in data:
            kwargs["base_seed"] = int(data["base_seed"])
        if "arena" in data:
            kwargs["arena"] = ArenaConfig(**data["arena"])
        if "thresholds" in data:
            t = dict(data["thresholds"])
            if "graspable_band" in t:
                t["graspable_band"] = tuple(t["graspable_band"])
            kwargs["thresholds"] = Thresholds(**t)
        if "head_camera" in data:
            kwargs["head_camera"] = CameraModel(**data["head_camera"])
        if "wrist_camera" in data:
            kwargs["wrist_camera"] = CameraModel(**data["wrist_camera"])
        extra = set(data) - {
            "subjects",
            "trials_per_subject",
            "base_seed",
            "arena",
            "thresholds",
            "head_camera",
            "wrist_camera",
        }
        if extra:
            raise ValueError(f"unknown experiment config keys: {sorted(extra)}")
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def to_json_dict(self) -> dict:
        return {
            "subjects": [s.to_json_dict() for s in self.subjects],
            "trials_per_subject": self.trials_per_subject,
            "base_seed": self.base_seed,
            "arena": self.arena.to_json_dict(),
            "thresholds": self.thresholds.to_json_dict(),
            "head_camera": self.head_camera.to_json_dict(),
            "wrist_camera": self.wrist_camera.to_json_dict(),
        }


@dataclass(frozen=True)
class TrialRecord:
    subject_id: str
    trial_index: int
    placement_index: int
    seed: int
    t1_s: float
    t2_s: float
    success: bool
    fail_reason: str | None

    def to_json_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "trial_index": self.trial_index,
            "placement_index": self.placement_index,
            "seed": self.seed,
            "t1_s": self.t1_s,
            "t2_s": self.t2_s,
            "success": self.success,
            "fail_reason": self.fail_reason,
        }


def derive_trial_seed(base_seed: int, subject_id: str, trial_index: int) -> int:
    """Stable 63-bit seed from the experiment coordinates."""
    key = f"{base_seed}|{subject_id}|{trial_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def run_trial(
    config: ExperimentConfig,
    subject: SubjectConfig,
    previous_placement: int | None,
    seed: int,
) -> TrialRecord:
    """One complete scripted trial; finishes by protocol or by timeout."""
    session = SimSession(
        SessionConfig(
            arena=config.arena,
            thresholds=config.thresholds,
            head_camera=config.head_camera,
            wrist_camera=config.wrist_camera,
            agent=subject.agent,
            seed=seed,
            mode="agent_driven",
        )
    )
    session.previous_placement = previous_placement
    ack = voice.dispatch(voice.Command(voice.CommandKind.GRASP, "bottle"), session)
    if not ack.get("ok"):
        raise RuntimeError(f"grasp command rejected: {ack}")
    session.run_until_done(collect_frames=False)
    t1, t2 = session.clocks()
    return TrialRecord(
        subject_id=subject.id,
        trial_index=session.trial_index,
        placement_index=int(session.current_placement or 0),
        seed=seed,
        t1_s=t1,
        t2_s=t2,
        success=bool(session.gstate.success),
        fail_reason=session.gstate.fail_reason,
    )


def run_experiment(
    config: ExperimentConfig,
    on_record: Callable[[TrialRecord], None] | None = None,
) -> list[TrialRecord]:
    """All subjects, all trials, in declaration order.

    Placements chain per subject (consecutive trials at least two segments
    apart).  A KeyboardInterrupt stops the sweep but returns what finished,
    so partial results are never lost.
    """
    records: list[TrialRecord] = []
    try:
        for subject in config.subjects:
            previous: int | None = None
            for trial_index in range(config.trials_per_subject):
                seed = derive_trial_seed(config.base_seed, subject.id, trial_index)
                record = run_trial(config, subject, previous, seed)
                record = replace(record, trial_index=trial_index)
                previous = record.placement_index
                records.append(record)
                if on_record is not None:
                    on_record(record)
    except KeyboardInterrupt:
        pass
    return records


# --- delimited and JSON output ---


def _format_float(x: float) -> str:
    return repr(float(x))


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.subject_id,
                r.trial_index,
                r.placement_index,
                r.seed,
                _format_float(r.t1_s),
                _format_float(r.t2_s),
                "true" if r.success else "false",
                r.fail_reason or "",
            ]
        )
    return buf.getvalue()


def write_csv(records: Iterable[TrialRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records), encoding="utf-8")


def read_csv(path: str | Path) -> list[TrialRecord]:
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def parse_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns: {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(
            TrialRecord(
                subject_id=row["subject_id"],
                trial_index=int(row["trial_index"]),
                placement_index=int(row["placement_index"]),
                seed=int(row["seed"]),
                t1_s=float(row["t1_s"]),
                t2_s=float(row["t2_s"]),
                success=row["success"] == "true",
                fail_reason=row["fail_reason"] or None,
            )
        )
    return out


def write_json(records: Iterable[TrialRecord], path: str | Path) -> None:
    payload = [r.to_json_dict() for r in records]
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# --- summaries ---


def moving_average(values: Sequence[float], window: int = MOVING_AVERAGE_WINDOW) -> list[float]:
    """Trailing mean over up to `window` latest values at each index."""
    out = []
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        chunk = values[lo : i + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def _describe(values: Sequence[float]) -> dict:
    vals = list(values)
    if not vals:
        return {
            "count": 0,
            "mean": None,
            "median": None,
            "stddev": None,
            "min": None,
            "q1": None,
            "q3": None,
            "max": None,
        }
    if len(vals) == 1:
        q1 = q3 = vals[0]
    else:
        qs = statistics.quantiles(vals, n=4, method="inclusive")
        q1, q3 = qs[0], qs[2]
    return {
        "count": len(vals),
        "mean": statistics.fmean(vals),
        "median": statistics.median(vals),
        "stddev": statistics.pstdev(vals),
        "min": min(vals),
        "q1": q1,
        "q3": q3,
        "max": max(vals),
    }


def summarize(records: Sequence[TrialRecord]) -> dict:
    """Per-subject and overall descriptive statistics plus learning curves."""
    by_subject: dict[str, list[TrialRecord]] = {}
    for r in records:
        by_subject.setdefault(r.subject_id, []).append(r)
    subjects = {}
    for sid, recs in by_subject.items():
        recs = sorted(recs, key=lambda r: r.trial_index)
        t1 = [r.t1_s for r in recs]
        t2 = [r.t2_s for r in recs]
        subjects[sid] = {
            "trials": len(recs),
            "success_rate": sum(1 for r in recs if r.success) / len(recs),
            "t1_s": _describe(t1),
            "t2_s": _describe(t2),
            "t1_moving_avg": moving_average(t1),
            "t2_moving_avg": moving_average(t2),
            "fail_reasons": _fail_counts(recs),
        }
    all_t1 = [r.t1_s for r in records]
    all_t2 = [r.t2_s for r in records]
    return {
        "subjects": subjects,
        "overall": {
            "trials": len(records),
            "success_rate": (sum(1 for r in records if r.success) / len(records)) if records else None,
            "t1_s": _describe(all_t1),
            "t2_s": _describe(all_t2),
            "fail_reasons": _fail_counts(records),
        },
    }


def _fail_counts(records: Iterable[TrialRecord]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for r in records:
        if not r.success and r.fail_reason:
            counts[r.fail_reason] = counts.get(r.fail_reason, 0) + 1
    return dict(sorted(counts.items()))


def write_summary(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
