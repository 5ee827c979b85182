"""Seeded Monte Carlo BER/FER sweeps and iteration profiles.

Every trial draws its channel noise from the sub-stream
``(master_seed, snr_index, trial_index)``. The decoder never enters the key,
so all decoders see identical channel LLRs at a given ``(snr, trial)``, and
results do not depend on how trials are spread over workers.

Trials are evaluated in fixed-size chunks. A chunk may run past the point at
which the stopping rule fires; those surplus trials are discarded when the
chunk results are scanned in trial order, which keeps the outcome identical
for any worker count.
"""
from __future__ import annotations

import configparser
import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .channel import awgn_transmit, bpsk_modulate, channel_llrs, ebno_db_to_noise_variance, random_stream
from .codes import CodeSpec, TannerGraph, construct_regular_code, encode_systematic, gf2_rank, is_codeword, load_alist
from .exceptions import ConfigError, RankError
from .schedulers import DecoderConfig, decode

logger = logging.getLogger(__name__)

CHUNK = 50
TRANSMISSIONS = ("all_zero", "encoded_random")
REPORT_COLUMNS = ("decoder", "snr_db", "codewords", "bit_errors", "frame_errors", "ber", "fer",
                  "ci_low", "ci_high", "avg_iters", "stop_reason")
PROFILE_COLUMNS = ("decoder", "snr_db", "iteration", "codewords", "bit_errors", "frame_errors", "ber", "fer")


def parse_snr_list(text: str) -> tuple[float, ...]:
    """``"0:0.5:4.5"`` (inclusive ranges) and/or comma-separated values."""
    points: list[float] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            try:
                start, step, stop = (float(x) for x in part.split(":"))
            except ValueError:
                raise ConfigError(f"bad SNR range {part!r}; expected start:step:stop") from None
            if step <= 0:
                raise ConfigError(f"SNR step must be positive in {part!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            points.extend(round(start + i * step, 12) for i in range(max(count, 0)))
        else:
            try:
                points.append(float(part))
            except ValueError:
                raise ConfigError(f"bad SNR value {part!r}") from None
    if not points:
        raise ConfigError("SNR list is empty")
    return tuple(points)


def estimate_ci(bit_errors: int, bits_sent: int) -> tuple[float, float]:
    """95% Wilson score interval for an error proportion."""
    if bits_sent < 1:
        raise ConfigError("bits_sent must be at least 1")
    ci = binomtest(int(bit_errors), int(bits_sent)).proportion_ci(0.95, method="wilson")
    low = 0.0 if bit_errors == 0 else float(ci.low)
    high = 1.0 if bit_errors == bits_sent else float(ci.high)
    return low, high


@dataclass(frozen=True)
class ExperimentPlan:
    code: CodeSpec | None = CodeSpec(512, 256, 3, 6)
    code_seed: int = 1
    alist_path: str | None = None
    decoders: tuple[DecoderConfig, ...] = (DecoderConfig(),)
    snr_points_db: tuple[float, ...] = (3.5,)
    max_codewords: int = 1_000_000
    max_error_events: int = 100
    master_seed: int = 1
    transmission: str = "all_zero"
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "decoders", tuple(self.decoders))
        object.__setattr__(self, "snr_points_db", tuple(float(s) for s in self.snr_points_db))
        if not self.snr_points_db:
            raise ConfigError("the SNR list must not be empty")
        if not self.decoders:
            raise ConfigError("at least one decoder is required")
        if self.max_codewords < 1 or self.max_error_events < 1:
            raise ConfigError("max_codewords and max_error_events must be >= 1")
        if self.transmission not in TRANSMISSIONS:
            raise ConfigError(f"transmission must be one of {TRANSMISSIONS}")
        if self.code is None and self.alist_path is None:
            raise ConfigError("either a code spec or an ALIST path is required")
        if self.labels is None:
            labels, seen = [], {}
            for d in self.decoders:
                seen[d.algorithm] = seen.get(d.algorithm, 0) + 1
                labels.append(d.algorithm if seen[d.algorithm] == 1 else f"{d.algorithm}#{seen[d.algorithm]}")
            object.__setattr__(self, "labels", tuple(labels))
        elif len(self.labels) != len(self.decoders):
            raise ConfigError("one label per decoder is required")

    def build_graph(self) -> TannerGraph:
        if self.alist_path is not None:
            return load_alist(self.alist_path)
        return construct_regular_code(self.code, self.code_seed)

    def describe(self) -> list[tuple[str, str]]:
        """Fully resolved settings as ``(key, value)`` pairs."""
        code = self.alist_path if self.alist_path else f"{self.code.n},{self.code.m},{self.code.dv},{self.code.dc}"
        out = [
            ("code", code),
            ("code_seed", str(self.code_seed)),
            ("snr_list", ",".join(repr(s) for s in self.snr_points_db)),
            ("max_codewords", str(self.max_codewords)),
            ("max_error_events", str(self.max_error_events)),
            ("seed", str(self.master_seed)),
            ("transmission", self.transmission),
        ]
        for label, d in zip(self.labels, self.decoders):
            params = " ".join(
                f"{'lambda' if k == 'lambda_' else k}={v}" for k, v in d.as_dict().items()
            )
            out.append((f"decoder.{label}", params))
        return out


def load_plan(path) -> ExperimentPlan:
    """Read an INI-style plan: an ``[experiment]`` section and one
    ``[decoder.<label>]`` section per decoder."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = dict(parser["experiment"])
    known = {"code", "code_seed", "snr_list", "max_codewords", "max_error_events", "seed", "transmission"}
    unknown = set(exp) - known
    if unknown:
        raise ConfigError(f"{path}: unknown experiment keys {sorted(unknown)}")
    labels, decoders = [], []
    for section in parser.sections():
        if section.startswith("decoder."):
            label = section.split(".", 1)[1]
            values = dict(parser[section])
            values.setdefault("algorithm", label)
            decoders.append(DecoderConfig.from_mapping(values))
            labels.append(label)
        elif section != "experiment":
            raise ConfigError(f"{path}: unexpected section [{section}]")
    code, alist = resolve_code(exp.get("code", "512,256,3,6"))
    try:
        return ExperimentPlan(
            code=code,
            alist_path=alist,
            code_seed=int(exp.get("code_seed", 1)),
            decoders=tuple(decoders) or (DecoderConfig(),),
            snr_points_db=parse_snr_list(exp.get("snr_list", "3.5")),
            max_codewords=int(exp.get("max_codewords", 1_000_000)),
            max_error_events=int(exp.get("max_error_events", 100)),
            master_seed=int(exp.get("seed", 1)),
            transmission=exp.get("transmission", "all_zero"),
            labels=tuple(labels) if labels else None,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def resolve_code(text: str) -> tuple[CodeSpec | None, str | None]:
    """``"n,m,dv,dc"`` becomes a spec; anything else is an ALIST path."""
    parts = str(text).replace(":", ",").split(",")
    if len(parts) == 4 and all(p.strip().lstrip("-").isdigit() for p in parts):
        n, m, dv, dc = (int(p) for p in parts)
        return CodeSpec(n, m, dv, dc), None
    if not Path(text).exists():
        raise ConfigError(f"code {text!r} is neither 'n,m,dv,dc' nor an existing ALIST file")
    return None, str(text)


# -- trials -------------------------------------------------------------------------


@dataclass
class TrialOutcome:
    bit_errors: int
    frame_error: bool
    iterations_used: int
    converged: bool
    #: ``converged`` was reported for a word that fails the parity checks
    unsound: bool
    errors_per_iteration: np.ndarray = field(repr=False)


class _Context:
    """Per-process cache of the graph and the encoder state for a plan."""

    def __init__(self, plan: ExperimentPlan, graph: TannerGraph | None = None):
        self.plan = plan
        self.graph = graph if graph is not None else plan.build_graph()
        self.rate = (self.graph.n - self.graph.m) / self.graph.n
        self.k_eff = None
        if plan.transmission == "encoded_random":
            rank = gf2_rank(self.graph)
            if rank < self.graph.m:
                logger.warning(
                    "%s; falling back to all-zero transmission",
                    RankError(rank, self.graph.m, self.graph.n),
                )
            else:
                self.k_eff = self.graph.n - rank

    def channel_input(self, snr_index: int, trial_index: int):
        plan = self.plan
        stream = random_stream(plan.master_seed, snr_index, trial_index)
        if self.k_eff is not None:
            info = stream.integers(0, 2, size=self.k_eff, dtype=np.uint8)
            codeword = encode_systematic(self.graph, info)
        else:
            codeword = np.zeros(self.graph.n, dtype=np.uint8)
        var = ebno_db_to_noise_variance(plan.snr_points_db[snr_index], self.rate)
        y = awgn_transmit(bpsk_modulate(codeword), var, stream)
        return codeword, channel_llrs(y, var)

    def trial(self, decoder: DecoderConfig, snr_index: int, trial_index: int) -> TrialOutcome:
        codeword, llrs = self.channel_input(snr_index, trial_index)
        result = decode(self.graph, llrs, decoder)
        wrong = result.decisions != codeword
        errors = wrong.sum(axis=1)
        bit_errors = int(errors[result.iterations_used])
        return TrialOutcome(
            bit_errors=bit_errors,
            frame_error=bit_errors > 0,
            iterations_used=result.iterations_used,
            converged=result.converged,
            unsound=result.converged and not is_codeword(self.graph, result.decoded),
            errors_per_iteration=errors,
        )


def run_trial(plan: ExperimentPlan, decoder: DecoderConfig, snr_db: float, trial_index: int,
              graph: TannerGraph | None = None) -> TrialOutcome:
    try:
        snr_index = plan.snr_points_db.index(float(snr_db))
    except ValueError:
        raise ConfigError(f"SNR {snr_db} is not part of the plan") from None
    return _Context(plan, graph).trial(decoder, snr_index, trial_index)


# -- worker plumbing ------------------------------------------------------------------

_WORKER_CONTEXT: _Context | None = None


def _init_worker(plan):
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = _Context(plan)


def _run_chunk(args):
    decoder_index, snr_index, start, stop = args
    ctx = _WORKER_CONTEXT
    decoder = ctx.plan.decoders[decoder_index]
    return [ctx.trial(decoder, snr_index, i) for i in range(start, stop)]


class _Runner:
    def __init__(self, plan: ExperimentPlan, workers: int, graph: TannerGraph | None):
        self.plan = plan
        self.workers = max(1, int(workers))
        self.pool = None
        if self.workers > 1:
            self.pool = ProcessPoolExecutor(self.workers, initializer=_init_worker, initargs=(plan,))
            self.graph = graph if graph is not None else plan.build_graph()
        else:
            global _WORKER_CONTEXT
            _WORKER_CONTEXT = _Context(plan, graph)
            self.graph = _WORKER_CONTEXT.graph

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def trials(self, decoder_index: int, snr_index: int, limit: int):
        """Yield outcomes in trial order, evaluating ``workers`` chunks at a time."""
        start = 0
        while start < limit:
            bounds = []
            for _ in range(self.workers):
                if start >= limit:
                    break
                bounds.append((decoder_index, snr_index, start, min(start + CHUNK, limit)))
                start += CHUNK
            if self.pool is None:
                chunks = map(_run_chunk, bounds)
            else:
                chunks = self.pool.map(_run_chunk, bounds)
            for chunk in chunks:
                yield from chunk


# -- sweeps ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    decoder: str
    snr_db: float
    codewords: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    ci_low: float
    ci_high: float
    avg_iters: float
    stop_reason: str
    iteration_histogram: tuple[int, ...] = ()
    unsound_converged: int = 0

    def csv_fields(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)
    n: int = 0

    def row(self, decoder: str, snr_db: float) -> SweepRow:
        for r in self.rows:
            if r.decoder == decoder and r.snr_db == snr_db:
                return r
        raise KeyError((decoder, snr_db))


def _sweep_row(label, snr_db, n, outcomes, t_max, stop_reason) -> SweepRow:
    codewords = len(outcomes)
    bit_errors = sum(o.bit_errors for o in outcomes)
    frame_errors = sum(o.frame_error for o in outcomes)
    hist = np.bincount([o.iterations_used for o in outcomes], minlength=t_max + 1)
    low, high = estimate_ci(bit_errors, codewords * n)
    return SweepRow(
        decoder=label,
        snr_db=snr_db,
        codewords=codewords,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        ber=bit_errors / (codewords * n),
        fer=frame_errors / codewords,
        ci_low=low,
        ci_high=high,
        avg_iters=sum(o.iterations_used for o in outcomes) / codewords,
        stop_reason=stop_reason,
        iteration_histogram=tuple(int(h) for h in hist),
        unsound_converged=sum(o.unsound for o in outcomes),
    )


def run_sweep(plan: ExperimentPlan, workers: int = 1, graph: TannerGraph | None = None) -> SweepReport:
    """Per (decoder, SNR): run trials until ``max_codewords`` have been sent or
    ``max_error_events`` frame errors have been seen, whichever comes first."""
    runner = _Runner(plan, workers, graph)
    report = SweepReport(n=runner.graph.n)
    try:
        for d_idx, (label, decoder) in enumerate(zip(plan.labels, plan.decoders)):
            for s_idx, snr in enumerate(plan.snr_points_db):
                outcomes = []
                frame_errors = 0
                stop_reason = "budget"
                for outcome in runner.trials(d_idx, s_idx, plan.max_codewords):
                    outcomes.append(outcome)
                    frame_errors += outcome.frame_error
                    if frame_errors >= plan.max_error_events:
                        stop_reason = "errors"
                        break
                report.rows.append(_sweep_row(label, snr, report.n, outcomes, decoder.t_max, stop_reason))
                logger.info("%s @ %.2f dB: %d codewords, BER %.3e", label, snr,
                            len(outcomes), report.rows[-1].ber)
    finally:
        runner.close()
    return report


# -- iteration profiles -------------------------------------------------------------------


@dataclass
class ProfileRow:
    decoder: str
    snr_db: float
    iteration: int
    codewords: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float


@dataclass
class IterationProfile:
    rows: list[ProfileRow] = field(default_factory=list)
    #: per decoder label, the iterations used in every trial (trial order)
    iterations: dict = field(default_factory=dict)
    #: per decoder label, a (trials, t_max + 1) array of bit errors per cap
    errors: dict = field(default_factory=dict)
    unsound_converged: int = 0
    n: int = 0

    def ber(self, decoder: str, iteration: int) -> float:
        for r in self.rows:
            if r.decoder == decoder and r.iteration == iteration:
                return r.ber
        raise KeyError((decoder, iteration))


def iteration_profile(plan: ExperimentPlan, snr_db: float, workers: int = 1,
                      graph: TannerGraph | None = None) -> IterationProfile:
    """BER when decoding is halted at each cap ``t = 1..t_max``.

    Each trial is decoded once with the full budget; the decision the decoder
    holds after ``t`` iterations (frozen once the syndrome is satisfied) gives
    the outcome for cap ``t``. Runs exactly ``max_codewords`` trials per
    decoder so all decoders are compared on the same noise realizations.
    """
    if float(snr_db) not in plan.snr_points_db:
        plan = _replace(plan, snr_points_db=(float(snr_db),))
    s_idx = plan.snr_points_db.index(float(snr_db))
    runner = _Runner(plan, workers, graph)
    profile = IterationProfile(n=runner.graph.n)
    try:
        for d_idx, (label, decoder) in enumerate(zip(plan.labels, plan.decoders)):
            outcomes = list(runner.trials(d_idx, s_idx, plan.max_codewords))
            errs = np.stack([o.errors_per_iteration for o in outcomes])
            profile.errors[label] = errs
            profile.iterations[label] = np.array([o.iterations_used for o in outcomes])
            profile.unsound_converged += sum(o.unsound for o in outcomes)
            count = len(outcomes)
            for t in range(1, decoder.t_max + 1):
                bit_errors = int(errs[:, t].sum())
                frame_errors = int((errs[:, t] > 0).sum())
                profile.rows.append(ProfileRow(
                    decoder=label, snr_db=float(snr_db), iteration=t, codewords=count,
                    bit_errors=bit_errors, frame_errors=frame_errors,
                    ber=bit_errors / (count * profile.n), fer=frame_errors / count,
                ))
    finally:
        runner.close()
    return profile


def _replace(plan: ExperimentPlan, **changes) -> ExperimentPlan:
    values = {f.name: getattr(plan, f.name) for f in fields(plan)}
    values.update(changes)
    return ExperimentPlan(**values)


# -- CSV ------------------------------------------------------------------------------------


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _write_csv(path, columns, rows, meta):
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            for key, value in meta or ():
                fh.write(f"# {key} = {value}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(getattr(row, c)) for c in columns])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report {path}: {exc.strerror}") from exc


def write_report_csv(report: SweepReport, path, meta=None) -> None:
    """One row per (decoder, SNR). ``meta`` pairs become leading ``#`` lines."""
    _write_csv(path, REPORT_COLUMNS, report.rows, meta)


def write_profile_csv(profile: IterationProfile, path, meta=None) -> None:
    _write_csv(path, PROFILE_COLUMNS, profile.rows, meta)


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_report_csv(path) -> SweepReport:
    rows = []
    for rec in _read_rows(path):
        rows.append(SweepRow(
            decoder=rec["decoder"], snr_db=float(rec["snr_db"]), codewords=int(rec["codewords"]),
            bit_errors=int(rec["bit_errors"]), frame_errors=int(rec["frame_errors"]),
            ber=float(rec["ber"]), fer=float(rec["fer"]), ci_low=float(rec["ci_low"]),
            ci_high=float(rec["ci_high"]), avg_iters=float(rec["avg_iters"]),
            stop_reason=rec["stop_reason"],
        ))
    return SweepReport(rows=rows)


def read_profile_csv(path) -> IterationProfile:
    rows = []
    for rec in _read_rows(path):
        rows.append(ProfileRow(
            decoder=rec["decoder"], snr_db=float(rec["snr_db"]), iteration=int(rec["iteration"]),
            codewords=int(rec["codewords"]), bit_errors=int(rec["bit_errors"]),
            frame_errors=int(rec["frame_errors"]), ber=float(rec["ber"]), fer=float(rec["fer"]),
        ))
    return IterationProfile(rows=rows)


def default_workers() -> int:
    return os.cpu_count() or 1
