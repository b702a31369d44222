"""Synthetic aquarium-controller logs with labelled fault injection.

The simulated plant has a round of periodic sensor readings, a feeding droid
that works tank by tank inside ``droid_status Operating``/``Waiting``
critical sections, daily lighting, cooling fans and a camera server whose
network status is polled. Injected faults come with the id range of the
entries they produced so detection can be scored against ground truth.

Anomaly kinds:

``mutual_exclusion``
    a manual feed interleaved inside a droid critical section whose closing
    ``Waiting`` never appears.
``reboot``
    the controller restarts mid-day and re-emits light status and the
    ``light*_ontime`` entries normally only seen at sunset.
``single_failure``
    the camera server reports ``Lost``.
``manual_operation``
    a feed outside any scheduled feeding slot.
``mass_duplicate``
    ``count`` identical faulty sensor rounds (zero readings and an
    argument-less ``lightning`` entry), spaced ``every`` rounds apart.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
import random
import sys
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

from lofscan.errors import ConfigError
from lofscan.log_model import LogEntry, parse_log, parse_timestamp

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

KINDS = ("mutual_exclusion", "reboot", "single_failure", "manual_operation", "mass_duplicate")

DAY = 86400
FEED_SLOT_SECONDS = 45 * 60
ONTIME_GRACE_SECONDS = 300
MANUAL_LIFT_OFFSET = 4
CAMERA_TARGET = "target_192.168.68.93_status"


@dataclass(frozen=True)
class SensorSpec:
    name: str
    mean: float
    stddev: float
    low: float
    high: float
    period_minutes: int = 10
    decimals: int = 1


@dataclass(frozen=True)
class ActuatorSpec:
    """A scheduled actuator.

    ``feed_tank_<n>`` feeders run at each ``schedule`` time (``HH:MM``) with
    ``amount``; ``light<n>`` uses ``schedule = (on, off)``; ``fan<n>``
    toggles on/off at random times, ``rate_per_day`` cycles a day.
    """

    name: str
    schedule: tuple[str, ...] = ()
    amount: float | None = None
    rate_per_day: float = 0.0


@dataclass(frozen=True)
class Injection:
    kind: str
    at_hours: float
    params: dict = field(default_factory=dict, hash=False)


DEFAULT_SENSORS = (
    SensorSpec("cputemp", 49.8, 1.2, 35.0, 80.0),
    SensorSpec("pressure", 1000.0, 3.0, 985.0, 1015.0),
    SensorSpec("water2", 27.1, 0.3, 24.0, 30.0),
    SensorSpec("water1", 26.0, 0.3, 24.0, 30.0),
    SensorSpec("water3", 27.8, 0.3, 24.0, 30.0),
    SensorSpec("level_3", 9.0, 0.3, 6.0, 12.0),
    SensorSpec("air", 28.0, 0.5, 20.0, 34.0),
    SensorSpec("humidity", 26.0, 2.0, 15.0, 40.0),
)

DEFAULT_ACTUATORS = (
    ActuatorSpec("feed_tank_1", ("12:00",), 4000),
    ActuatorSpec("feed_tank_2", ("12:00",), 4800),
    ActuatorSpec("feed_tank_3", ("12:00",), 3000),
    ActuatorSpec("light1", ("06:45", "17:58")),
    ActuatorSpec("light2", ("06:40", "18:20")),
    ActuatorSpec("light3", ("06:35", "18:40")),
    ActuatorSpec("fan1", rate_per_day=1.0),
    ActuatorSpec("fan2", rate_per_day=1.0),
    ActuatorSpec("fan3", rate_per_day=1.0),
)

# droid pose per tank: tank_pos, lift_pos, swing_h, swing_v, movediff after feeding
TANK_POSES = {
    1: (8, 5, 120, 125, "2,-3"),
    2: (12, 6, 150, 150, "4,4"),
    3: (16, 7, 0, -20, "2,0"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 1
    duration_hours: float = 24.0
    start: str = "2015-01-01 00:00"
    first_id: int = 1
    max_entries: int | None = None
    sensors: tuple[SensorSpec, ...] = DEFAULT_SENSORS
    actuators: tuple[ActuatorSpec, ...] = DEFAULT_ACTUATORS
    heartbeat_minutes: int = 60
    injections: tuple[Injection, ...] = ()
    min_gap_entries: int = 22

    def validate(self) -> None:
        if self.duration_hours <= 0:
            raise ConfigError("duration_hours must be positive")
        for s in self.sensors:
            if s.period_minutes <= 0:
                raise ConfigError(f"sensor {s.name}: period must be positive")
        if self.heartbeat_minutes <= 0:
            raise ConfigError("heartbeat_minutes must be positive")
        for a in self.actuators:
            if a.name.startswith("light") and len(a.schedule) != 2:
                raise ConfigError(f"{a.name}: schedule must be (on, off)")
            if a.rate_per_day < 0:
                raise ConfigError(f"{a.name}: rate_per_day must be >= 0")
        for inj in self.injections:
            if inj.kind not in KINDS:
                raise ConfigError(f"unknown anomaly kind {inj.kind!r}")
            if not 0 <= inj.at_hours < self.duration_hours:
                raise ConfigError(
                    f"{inj.kind} injection at {inj.at_hours} h is outside the {self.duration_hours} h run"
                )

    @property
    def start_ts(self) -> int:
        return parse_timestamp(self.start)

    @property
    def feed_times(self) -> list[int]:
        """Scheduled feeding times as seconds after midnight."""
        return sorted({_hhmm(t) for a in self.actuators if a.name.startswith("feed_tank_") for t in a.schedule})

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioConfig:
        kw = {k: d[k] for k in ("seed", "duration_hours", "start", "first_id", "max_entries",
                                "heartbeat_minutes", "min_gap_entries") if k in d}
        if "sensors" in d:
            kw["sensors"] = tuple(SensorSpec(**s) for s in d["sensors"])
        if "actuators" in d:
            kw["actuators"] = tuple(
                ActuatorSpec(**{**a, "schedule": tuple(a.get("schedule", ()))}) for a in d["actuators"]
            )
        if "injections" in d:
            kw["injections"] = tuple(
                Injection(i["kind"], float(i["at_hours"]), dict(i.get("params", {}))) for i in d["injections"]
            )
        unknown = set(d) - set(kw) - {"sensors", "actuators", "injections"}
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def from_toml(cls, path: str | Path) -> ScenarioConfig:
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))


@dataclass(frozen=True)
class TruthRange:
    kind: str
    first_id: int
    last_id: int

    def to_dict(self) -> dict:
        return {"kind": self.kind, "first_id": self.first_id, "last_id": self.last_id}

    def overlaps(self, first: int, last: int) -> bool:
        return first <= self.last_id and self.first_id <= last


def _hhmm(text: str) -> int:
    h, m = text.split(":")
    return int(h) * 3600 + int(m) * 60


# ---------------------------------------------------------------------------
# generation


Row = tuple  # (command, numeric_arg, string_arg)


class _Sim:
    """Discrete-event loop. Each event is a timed batch of rows."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.t0 = cfg.start_ts
        self.t_end = self.t0 + int(round(cfg.duration_hours * 3600))
        self._heap: list = []
        self._seq = 0

    def at(self, ts: int, rows: Sequence[Row], tag: str | None = None, prio: int = 1) -> None:
        if self.t0 <= ts < self.t_end:
            heapq.heappush(self._heap, (ts, prio, self._seq, list(rows), tag))
            self._seq += 1

    def days(self) -> Iterable[int]:
        day0 = self.t0 - self.t0 % DAY
        d = day0
        while d < self.t_end:
            yield d
            d += DAY

    def drain(self):
        while self._heap:
            ts, _, _, rows, tag = heapq.heappop(self._heap)
            yield ts, rows, tag


def _sensor_round(sim: _Sim, sensors: Sequence[SensorSpec]) -> list[Row]:
    rows = []
    for s in sensors:
        v = sim.rng.gauss(s.mean, s.stddev)
        v = min(max(v, s.low), s.high)
        rows.append((s.name, round(v, s.decimals), None))
    return rows


FAULTY_ROUND: tuple[Row, ...] = (("level_3", 0.0, None), ("lightning", None, None), ("humidity", 0.0, None))


def _feed_routine(sim: _Sim, start: int, tanks: Sequence[tuple[int, float]], tag_map=None) -> int:
    """Schedule the droid visiting ``tanks`` in order; returns the end time."""
    rng = sim.rng
    t = start
    for tank, amount in tanks:
        pos, lift, sh, sv, move = TANK_POSES.get(tank, (4 * tank + 4, 4 + tank, 0, 0, "2,0"))
        steps = [
            (0, ("droid_tank_pos", float(pos), None)),
            (0, ("droid_lift_pos", float(lift), None)),
            (rng.randint(12, 30), (f"feed_tank_{tank}", float(amount), None)),
            (rng.randint(10, 18), ("droid_swing_h", float(sh), None)),
            (rng.randint(0, 1), ("droid_swing_v", float(sv), None)),
            (rng.randint(0, 1), ("droid_status", None, "Operating")),
            (rng.randint(3, 5), ("droid_movediff", None, move)),
            (rng.randint(40, 90), ("droid_status", None, "Waiting")),
        ]
        for dt, row in steps:
            t += dt
            sim.at(t, [row], tag=(tag_map or {}).get((tank, row[0], row[2])))
        t += rng.randint(1, 5)
    return t


def _baseline(sim: _Sim, skip_rounds: set[int], mutex: dict[int, dict]) -> None:
    """Schedule normal plant behaviour. ``mutex`` maps feeding slot times to
    mutual-exclusion injection parameters."""
    cfg = sim.cfg
    rng = sim.rng

    # sensor rounds on the period grid; all sensors share the first period
    period = min(s.period_minutes for s in cfg.sensors) * 60 if cfg.sensors else 600
    first = sim.t0 + (-sim.t0) % period
    k = 0
    t = first
    while t < sim.t_end:
        if k not in skip_rounds:
            due = [s for s in cfg.sensors if (t // 60) % s.period_minutes == 0]
            sim.at(t, _sensor_round(sim, due), prio=0)
        k += 1
        t += period

    # camera server heartbeat
    hb = cfg.heartbeat_minutes * 60
    t = sim.t0 + (-sim.t0) % hb + 30
    while t < sim.t_end:
        sim.at(t, [(CAMERA_TARGET, None, "Alive")])
        t += hb

    feeders = [a for a in cfg.actuators if a.name.startswith("feed_tank_")]
    lights = [a for a in cfg.actuators if a.name.startswith("light")]
    fans = [a for a in cfg.actuators if a.name.startswith("fan")]

    for day in sim.days():
        # feeding: one routine per schedule slot, tanks in numeric order
        for slot in cfg.feed_times:
            tanks = sorted(
                (int(a.name.rsplit("_", 1)[1]), a.amount or 0.0)
                for a in feeders
                if slot in {_hhmm(s) for s in a.schedule}
            )
            start = day + slot + rng.randint(0, 90)
            if sim.t0 <= start < sim.t_end:
                if day + slot in mutex:
                    _mutex_routine(sim, start, tanks, mutex[day + slot])
                else:
                    _feed_routine(sim, start, tanks)

        # lighting: each light follows its own schedule; at sunset it
        # switches off and logs the next morning's on-time
        for a in lights:
            on_t = day + _hhmm(a.schedule[0]) + rng.randint(0, 120)
            sim.at(on_t, [(f"{a.name}_status", None, "on")])
            off_t = day + _hhmm(a.schedule[1]) + rng.randint(0, 300)
            sim.at(off_t, [(f"{a.name}_status", None, "off"), (f"{a.name}_ontime", None, a.schedule[0])])

        for a in fans:
            n = _poisson(rng, a.rate_per_day)
            for _ in range(n):
                on = day + rng.randint(9 * 3600, 20 * 3600)
                sim.at(on, [(f"{a.name}_status", None, "on")])
                sim.at(on + rng.randint(600, 3600), [(f"{a.name}_status", None, "off")])


def _poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    limit, k, p = math.exp(-lam), 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _mutex_routine(sim: _Sim, start: int, tanks, params: dict) -> None:
    """Feeding routine where a manual feed breaks into one critical section."""
    rng = sim.rng
    victim = int(params.get("tank", tanks[min(1, len(tanks) - 1)][0]))
    manual_tank = int(params.get("manual_tank", victim))
    manual_amount = float(params.get("amount", 1000))
    tag = params["_tag"]
    t = start
    for tank, amount in tanks:
        if tank != victim:
            t = _feed_routine(sim, t, [(tank, amount)])
            continue
        pos, lift, sh, sv, move = TANK_POSES.get(tank, (4 * tank + 4, 4 + tank, 0, 0, "2,0"))
        plain = [
            (0, ("droid_tank_pos", float(pos), None), None),
            (0, ("droid_lift_pos", float(lift), None), None),
            (rng.randint(12, 30), (f"feed_tank_{tank}", float(amount), None), None),
            (rng.randint(10, 18), ("droid_swing_h", float(sh), None), None),
            (rng.randint(0, 1), ("droid_swing_v", float(sv), None), None),
            (rng.randint(0, 1), ("droid_status", None, "Operating"), tag),
            (rng.randint(3, 5), ("droid_movediff", None, move), tag),
            (rng.randint(100, 140), ("droid_lift_pos", float(lift + MANUAL_LIFT_OFFSET), None), tag),
            (rng.randint(100, 130), (f"feed_tank_{manual_tank}", manual_amount, None), tag),
        ]
        for dt, row, tg in plain:
            t += dt
            sim.at(t, [row], tag=tg)
        t += rng.randint(5, 20)


def _reboot_rows(sim: _Sim, ts: int) -> list[Row]:
    lights = [a for a in sim.cfg.actuators if a.name.startswith("light")]
    tod = ts % DAY
    rows = []
    for a in reversed(lights):
        on = _hhmm(a.schedule[0]) <= tod < _hhmm(a.schedule[1])
        rows.append((f"{a.name}_status", None, "on" if on else "off"))
    for a in reversed(lights):
        rows.append((f"{a.name}_ontime", None, a.schedule[0]))
    return rows


def generate(cfg: ScenarioConfig) -> tuple[list[LogEntry], list[TruthRange]]:
    """Simulate the scenario; deterministic for a given config."""
    cfg.validate()
    sim = _Sim(cfg)
    rng = sim.rng

    skip_rounds: set[int] = set()
    faulty_rounds: dict[int, str] = {}
    mutex: dict[int, dict] = {}
    tags: list[tuple[str, str]] = []  # (tag, kind) in injection order

    # resolve injections that alter the baseline before it is built
    period = min(s.period_minutes for s in cfg.sensors) * 60 if cfg.sensors else 600
    first_round = sim.t0 + (-sim.t0) % period
    for n, inj in enumerate(cfg.injections):
        tag = f"inj{n}"
        tags.append((tag, inj.kind))
        at = sim.t0 + int(round(inj.at_hours * 3600))
        if inj.kind == "mass_duplicate":
            count = int(inj.params.get("count", 50))
            every = int(inj.params.get("every", 4))
            k0 = max(0, -(-(at - first_round) // period))
            for j in range(count):
                kk = k0 + j * every
                skip_rounds.add(kk)
                faulty_rounds[kk] = f"{tag}.{j}"
        elif inj.kind == "mutual_exclusion":
            mutex_at = _next_feed_slot(cfg, at)
            if mutex_at is None:
                raise ConfigError(f"no scheduled feeding after {inj.at_hours} h for mutual_exclusion")
            mutex[mutex_at] = {**inj.params, "_tag": tag}

    _baseline(sim, skip_rounds, mutex)

    for kk, tag in faulty_rounds.items():
        ts = first_round + kk * period
        if ts >= sim.t_end:
            raise ConfigError("mass_duplicate rounds run past the end of the scenario")
        sim.at(ts, FAULTY_ROUND, tag=tag, prio=0)

    for n, inj in enumerate(cfg.injections):
        tag = f"inj{n}"
        at = sim.t0 + int(round(inj.at_hours * 3600)) + rng.randint(0, 59)
        if inj.kind == "reboot":
            sim.at(at, _reboot_rows(sim, at), tag=tag)
        elif inj.kind == "single_failure":
            sim.at(at, [(CAMERA_TARGET, None, "Lost")], tag=tag)
        elif inj.kind == "manual_operation":
            if _in_feed_slot(cfg, at):
                raise ConfigError(f"manual_operation at {inj.at_hours} h falls inside a feeding slot")
            tank = int(inj.params.get("tank", 1))
            amount = float(inj.params.get("amount", 1000))
            pos, lift, *_ = TANK_POSES.get(tank, (4 * tank + 4, 4 + tank, 0, 0, "2,0"))
            # manual feeds drive the lift to the hand-feeding height
            lift = int(inj.params.get("lift", lift + MANUAL_LIFT_OFFSET))
            sim.at(at, [("droid_tank_pos", float(pos), None), ("droid_lift_pos", float(lift), None)], tag=tag)
            sim.at(at + rng.randint(15, 30), [(f"feed_tank_{tank}", amount, None)], tag=tag)

    entries: list[LogEntry] = []
    spans: dict[str, list[int]] = {}
    cut: set[str] = set()
    next_id = cfg.first_id
    for ts, rows, tag in sim.drain():
        for cmd, num, arg in rows:
            if cfg.max_entries is not None and len(entries) >= cfg.max_entries:
                if tag is not None:
                    cut.add(tag.split(".")[0])
                continue
            e = LogEntry(next_id, ts, cmd, num, arg)
            entries.append(replace(e, raw=e.to_csv_line()))
            if tag is not None:
                spans.setdefault(tag, []).append(next_id)
            next_id += 1
    if cut:
        raise ConfigError(f"injections {sorted(cut)} are cut off by max_entries={cfg.max_entries}")

    truth: list[TruthRange] = []
    for tag, kind in tags:
        if kind == "mass_duplicate":
            subs = sorted((k for k in spans if k.startswith(tag + ".")), key=lambda k: int(k.split(".")[1]))
            count = len([k for k in faulty_rounds.values() if k.startswith(tag + ".")])
            if len(subs) != count or any(len(spans[k]) != len(FAULTY_ROUND) for k in subs):
                raise ConfigError(f"{kind} injection does not fit inside the generated log")
            truth.extend(TruthRange(kind, spans[k][0], spans[k][-1]) for k in subs)
        else:
            ids = spans.get(tag)
            if not ids:
                raise ConfigError(f"{kind} injection does not fit inside the generated log")
            truth.append(TruthRange(kind, ids[0], ids[-1]))
    truth.sort(key=lambda r: r.first_id)
    for a, b in zip(truth, truth[1:]):
        if b.first_id - a.last_id < cfg.min_gap_entries:
            raise ConfigError(
                f"injections {a.kind}@{a.first_id} and {b.kind}@{b.first_id} are closer than "
                f"{cfg.min_gap_entries} entries; spread them out"
            )
    return entries, truth


def _next_feed_slot(cfg: ScenarioConfig, at: int) -> int | None:
    times = cfg.feed_times
    if not times:
        return None
    day = at - at % DAY
    end = cfg.start_ts + int(round(cfg.duration_hours * 3600))
    while day < end:
        for t in times:
            if day + t >= at and day + t < end:
                return day + t
        day += DAY
    return None


def _in_feed_slot(cfg: ScenarioConfig, ts: int) -> bool:
    tod = ts % DAY
    return any(0 <= tod - t <= FEED_SLOT_SECONDS for t in cfg.feed_times)


def render_log(entries: Iterable[LogEntry]) -> str:
    return "".join(e.to_csv_line() + "\n" for e in entries)


def truth_json(truth: Sequence[TruthRange]) -> str:
    return json.dumps([t.to_dict() for t in truth], indent=2) + "\n"


def load_truth(path: str | Path) -> list[TruthRange]:
    return [TruthRange(d["kind"], int(d["first_id"]), int(d["last_id"]))
            for d in json.loads(Path(path).read_text(encoding="utf-8"))]


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    rule: str
    first_id: int
    last_id: int
    detail: str = ""


@dataclass
class ValidationResult:
    ok: bool
    violations: list[Violation]
    problems: list[str]

    def __bool__(self) -> bool:
        return self.ok


def find_violations(entries: Sequence[LogEntry], cfg: ScenarioConfig | None = None) -> list[Violation]:
    """Replay a log against the baseline plant rules.

    Rules: droid commands other than ``droid_movediff`` must not run inside an
    ``Operating``..``Waiting`` section; ``light<n>_ontime`` must follow an
    on-to-off switch of the same light; the camera target must report
    ``Alive``; feeds only happen in scheduled slots; sensors never read
    exactly 0 and ``lightning`` is never logged.
    """
    cfg = cfg or ScenarioConfig()
    zero_bad = {s.name for s in cfg.sensors if s.low > 0}
    out: list[Violation] = []

    open_at: LogEntry | None = None
    light_state: dict[str, str] = {}
    last_switch: dict[str, tuple[int, bool]] = {}  # light -> (ts, was on->off)

    for e in entries:
        cmd = e.command
        if cmd == "droid_status":
            if e.string_arg == "Operating":
                if open_at is not None:
                    out.append(Violation("mutual_exclusion", open_at.id, e.id, "nested Operating"))
                open_at = e
            elif e.string_arg == "Waiting":
                open_at = None
        elif cmd.startswith("droid_") or cmd.startswith("feed_tank_"):
            if open_at is not None and cmd != "droid_movediff":
                out.append(Violation("mutual_exclusion", open_at.id, e.id, f"{cmd} inside critical section"))
                open_at = None

        if cmd.startswith("feed_tank_") and not _in_feed_slot(cfg, e.timestamp):
            out.append(Violation("manual_operation", e.id, e.id, "feed outside schedule"))

        if cmd.startswith("light") and cmd.endswith("_status"):
            light = cmd[: -len("_status")]
            prev = light_state.get(light)
            new = e.string_arg
            if prev is not None and prev == new:
                out.append(Violation("reboot", e.id, e.id, f"{light} already {new}"))
            last_switch[light] = (e.timestamp, prev == "on" and new == "off")
            light_state[light] = new
        elif cmd.startswith("light") and cmd.endswith("_ontime"):
            light = cmd[: -len("_ontime")]
            sw = last_switch.get(light)
            if sw is None or not sw[1] or e.timestamp - sw[0] > ONTIME_GRACE_SECONDS:
                out.append(Violation("reboot", e.id, e.id, f"{cmd} without sunset switch-off"))

        if cmd.startswith("target_") and cmd.endswith("_status") and e.string_arg != "Alive":
            out.append(Violation("single_failure", e.id, e.id, f"{cmd} {e.string_arg}"))

        if cmd in zero_bad and e.numeric_arg == 0:
            out.append(Violation("sensor_fault", e.id, e.id, f"{cmd} reads 0"))
        if cmd == "lightning":
            out.append(Violation("sensor_fault", e.id, e.id, "lightning entry"))
    return out


def validate(
    log: Sequence[LogEntry] | str | bytes,
    truth: Sequence[TruthRange],
    cfg: ScenarioConfig | None = None,
) -> ValidationResult:
    """Check that every truth range breaks the plant rules and nothing else does."""
    entries = parse_log(log) if isinstance(log, (str, bytes)) else list(log)
    violations = find_violations(entries, cfg)
    problems: list[str] = []
    for t in truth:
        if not any(t.first_id <= v.first_id and v.last_id <= t.last_id for v in violations):
            problems.append(f"{t.kind} range {t.first_id}-{t.last_id} shows no rule violation")
    for v in violations:
        if not any(t.first_id <= v.first_id and v.last_id <= t.last_id for t in truth):
            problems.append(f"{v.rule} violation at {v.first_id}-{v.last_id} not covered by truth ({v.detail})")
    for p in problems:
        logger.info("validate: %s", p)
    return ValidationResult(not problems, violations, problems)


def synth_to_files(cfg: ScenarioConfig, log_path: str | Path, truth_path: str | Path) -> tuple[int, int]:
    entries, truth = generate(cfg)
    Path(log_path).write_text(render_log(entries), encoding="utf-8")
    Path(truth_path).write_text(truth_json(truth), encoding="utf-8")
    return len(entries), len(truth)
