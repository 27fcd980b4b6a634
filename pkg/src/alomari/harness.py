"""Verification sweeps: every applicable bound for every (params, function) pair."""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .bounds import (
    BoundReport,
    GSExtremalSpec,
    Verdict,
    alomari_bound,
    case_constant,
    gs_extremal_function,
    guessab_schmeisser_bound,
    theorem5_report,
)
from .errors import InconsistentCase, InvalidParameters, StepTooLarge
from .exactness import classify_exactness, probe_exactness, table1_rows
from .funcspace import Interval, TestFunction, corpus_ids, derivative_sup, get_function
from .kernels import CASE_ORDERS, CaseId, CaseTag, check_case, optimal_node
from .moduli import (
    SIMPSON_INTERVAL,
    c0_estimate_first_order,
    c0_estimate_fourth_order,
    c0_estimate_second_order,
)
from .rules import RuleParams, error_functional

CSV_PARAM_COLUMNS = ("a", "b", "lambda", "mu", "x", "function", "n_classified", "n_probed")
CSV_COLUMNS = CSV_PARAM_COLUMNS + (
    "source", "order", "constant", "oracle", "verdict", "E", "bound", "satisfied", "slack",
)
DEFAULT_CONFIG_NAME = "default.json"
NOT_APPLICABLE = "n/a"


def fmt(v) -> str:
    """Shortest round-trip text for floats; plain str otherwise."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_real(v) -> float:
    if isinstance(v, bool):
        raise InvalidParameters(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    try:
        return float(Fraction(str(v)))
    except (ValueError, ZeroDivisionError):
        raise InvalidParameters(f"not a number: {v!r}") from None


@dataclass(frozen=True)
class Tolerances:
    integral: float = 1e-12
    constant: float = 1e-9
    inequality: float = 1e-8

    def __post_init__(self):
        for name in ("integral", "constant", "inequality"):
            if not getattr(self, name) >= 0:
                raise InvalidParameters(f"tolerance {name} must be nonnegative")
        if self.integral <= 0:
            raise InvalidParameters("integral tolerance must be positive")


@dataclass(frozen=True)
class RunConfig:
    """Sweep definition.  x_grid entries are absolute abscissae, fractions such as
    "1/3", or the tokens "mid" and "xstar" (the optimal node x*(lambda))."""

    interval: Interval
    lambda_grid: tuple
    mu_grid: tuple
    x_grid: tuple
    corpus_filter: tuple = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_format: str = "csv"
    output_path: str = "report.csv"
    workers: int = 1

    def __post_init__(self):
        if not (self.lambda_grid and self.mu_grid and self.x_grid):
            raise InvalidParameters("grids must be nonempty")
        for lam in self.lambda_grid:
            if not 0 <= parse_real(lam) <= 1:
                raise InvalidParameters(f"lambda {lam} outside [0, 1]")
        for mu in self.mu_grid:
            if not 0 <= parse_real(mu) <= 1:
                raise InvalidParameters(f"mu {mu} outside [0, 1]")
        for x in self.x_grid:
            if x in ("mid", "xstar"):
                continue
            if not self.interval.contains(parse_real(x)):
                raise InvalidParameters(f"x {x} outside the interval")
        if self.output_format not in ("csv", "json"):
            raise InvalidParameters("output format must be csv or json")
        if self.workers < 1:
            raise InvalidParameters("workers must be positive")
        self.function_ids()  # validates the filter

    def function_ids(self) -> list[str]:
        ids = sorted(corpus_ids(self.interval))
        if not self.corpus_filter:
            return ids
        chosen = [i for i in ids if i in set(self.corpus_filter)]
        if not chosen:
            raise InvalidParameters(f"corpus filter {list(self.corpus_filter)} matches no function")
        return chosen

    def params(self) -> list[RuleParams]:
        iv = self.interval
        out = {}
        for lam in map(parse_real, self.lambda_grid):
            for mu in map(parse_real, self.mu_grid):
                for xv in self.x_grid:
                    if xv == "mid":
                        x = iv.midpoint()
                    elif xv == "xstar":
                        if lam > 1 / 3:
                            continue
                        x = optimal_node(lam, iv)
                    else:
                        x = parse_real(xv)
                    out[(lam, mu, x)] = RuleParams(lam, mu, x, iv)
        return [out[k] for k in sorted(out)]

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            a, b = d["interval"]
            out = d.get("output", {})
            tol = d.get("tolerances", {})
            return cls(
                interval=Interval(parse_real(a), parse_real(b)),
                lambda_grid=tuple(d["lambda_grid"]),
                mu_grid=tuple(d["mu_grid"]),
                x_grid=tuple(d["x_grid"]),
                corpus_filter=tuple(d.get("corpus_filter", ())),
                tolerances=Tolerances(**{k: float(v) for k, v in tol.items()}),
                output_format=out.get("format", "csv").lower(),
                output_path=out.get("path", "report.csv"),
                workers=int(d.get("workers", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameters(f"bad config: {exc}") from exc

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunConfig":
        """Read a config file; a bare "default.json" falls back to the packaged copy."""
        p = Path(path)
        if p.exists():
            text = p.read_text()
        elif p.name == DEFAULT_CONFIG_NAME and str(path) == p.name:
            text = resources.files("alomari.data").joinpath(DEFAULT_CONFIG_NAME).read_text()
        else:
            raise FileNotFoundError(path)
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidParameters(f"config is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class BoundCheck:
    source: str
    order: int
    constant: Optional[float]
    oracle: Optional[float]
    verdict: str
    bound: float
    satisfied: bool
    slack: float


@dataclass(frozen=True)
class VerificationRecord:
    params: RuleParams
    function_id: str
    E: float
    checks: tuple[BoundCheck, ...]
    n_classified: int
    n_probed: int

    @property
    def exactness_agrees(self) -> bool:
        return self.n_classified == self.n_probed

    @property
    def violations(self) -> int:
        bad = sum(1 for c in self.checks if not c.satisfied or c.verdict == Verdict.MISMATCH.value)
        return bad + (0 if self.exactness_agrees else 1)

    def rows(self) -> list[list[str]]:
        p = self.params
        head = [fmt(p.iv.a), fmt(p.iv.b), fmt(p.lam), fmt(p.mu), fmt(p.x), self.function_id,
                fmt(self.n_classified), fmt(self.n_probed)]
        return [
            head + [c.source, fmt(c.order), fmt(c.constant), fmt(c.oracle), c.verdict, fmt(self.E),
                    fmt(c.bound), fmt(c.satisfied), fmt(c.slack)]
            for c in self.checks
        ]

    def to_dict(self) -> dict:
        p = self.params
        return {
            "a": p.iv.a, "b": p.iv.b, "lambda": p.lam, "mu": p.mu, "x": p.x,
            "function": self.function_id, "E": self.E,
            "exactness": {"classified": self.n_classified, "probed": self.n_probed},
            "checks": [c.__dict__ for c in self.checks],
        }


def applicable_cases(p: RuleParams) -> list[CaseId]:
    out = []
    for tag in CaseTag:
        try:
            check_case(tag, p)
        except InconsistentCase:
            continue
        out.extend(CaseId(tag, k) for k in CASE_ORDERS[tag])
    return out


def case_report(c: CaseId, p: RuleParams) -> BoundReport:
    q = p.canonical()
    return case_constant(c, p.iv, lam=q.lam, x=q.x, mu=q.mu)


def _check(source, order, constant, oracle, verdict, E, bound, tol) -> BoundCheck:
    slack = bound - abs(E)
    return BoundCheck(source, order, constant, oracle, verdict, bound, slack >= -tol, slack)


def _derivative_norm(f: TestFunction, k: int, iv: Interval) -> Optional[float]:
    return derivative_sup(f, k, iv) if f.has_derivative(k) else None


def verify_pair(p: RuleParams, f: TestFunction, tol: Tolerances) -> VerificationRecord:
    iv = p.iv
    q = p.canonical()
    E = error_functional(f, p, tol.integral)
    checks: list[BoundCheck] = []
    na = NOT_APPLICABLE

    lip = f.lipschitz
    d1 = _derivative_norm(f, 1, iv)
    M1 = d1 if d1 is not None else (lip[0] if lip and lip[1] == 1 else None)
    t5 = theorem5_report(p)
    if M1 is not None:
        checks.append(_check("Thm5", 1, t5.constant, t5.oracle_value, t5.verdict.value, E,
                             t5.constant * M1, tol.inequality))

    cases = applicable_cases(p)
    for c in cases:
        norm = _derivative_norm(f, c.derivative_order, iv)
        if norm is None:
            continue
        r = case_report(c, p)
        checks.append(_check(r.source, c.derivative_order, r.constant, r.oracle_value, r.verdict.value, E,
                             r.constant * norm, tol.inequality))

    symmetric = abs(q.mu - 0.5) <= 1e-12 or abs(q.x - iv.midpoint()) <= 1e-12 * iv.length()
    if lip is not None and symmetric:
        M, alpha = lip
        if q.lam == 0:
            g = guessab_schmeisser_bound(q.x, alpha, iv)
            oracle = t5.constant if alpha == 1 else None
            checks.append(_check("GS-Lip", 1, g, oracle, na, E, M * g, tol.inequality))
        if alpha == 1 and q.x >= iv.a + q.lam * iv.length() / 2 - 1e-12 * iv.length():
            g = alomari_bound(q.x, q.lam, iv)
            checks.append(_check("Alomari-Lip", 1, g, t5.constant, na, E, M * g, tol.inequality))

    checks.append(_check("C0-omega1", 0, t5.constant, None, na, E,
                         c0_estimate_first_order(f, p), tol.inequality))
    for c in cases:
        if c.derivative_order == 2:
            C2 = case_report(c, p).constant
            try:
                bound = c0_estimate_second_order(f, C2, iv)
            except StepTooLarge:
                continue
            checks.append(_check(f"C0-omega2[{c.tag.value}]", 0, C2, None, na, E, bound, tol.inequality))
        if c.tag is CaseTag.SIMPSON and c.derivative_order == 4 and iv == SIMPSON_INTERVAL:
            C4 = case_report(c, p).constant
            checks.append(_check("C0-omega4[Simpson]", 0, C4, None, na, E,
                                 c0_estimate_fourth_order(f, C4, iv), tol.inequality))

    n_c = classify_exactness(p.lam, p.mu, p.x, iv).degree
    n_p = probe_exactness(p).degree
    return VerificationRecord(p, f.id, E, tuple(checks), n_c, n_p)


def _verify_params(args) -> list[VerificationRecord]:
    p, ids, tol = args
    return [verify_pair(p, get_function(i, p.iv), tol) for i in ids]


@dataclass(frozen=True)
class RunSummary:
    records: int
    checks: int
    verdicts: dict
    violations: int

    def line(self) -> str:
        v = self.verdicts
        return (f"records={self.records} checks={self.checks} "
                f"Match={v.get(Verdict.MATCH.value, 0)} "
                f"PaperTypoResolved={v.get(Verdict.PAPER_TYPO_RESOLVED.value, 0)} "
                f"NoPaperValue={v.get(Verdict.NO_PAPER_VALUE.value, 0)} "
                f"Mismatch={v.get(Verdict.MISMATCH.value, 0)} violations={self.violations}")


def run_sweep(config: RunConfig) -> list[VerificationRecord]:
    ids = config.function_ids()
    work = [(p, ids, config.tolerances) for p in config.params()]
    if config.workers == 1:
        chunks = map(_verify_params, work)
        records = [r for chunk in chunks for r in chunk]
    else:
        with ProcessPoolExecutor(config.workers) as pool:
            records = [r for chunk in pool.map(_verify_params, work) for r in chunk]
    return sorted(records, key=lambda r: (r.params.lam, r.params.mu, r.params.x, r.function_id))


def summarize(records: Iterable[VerificationRecord]) -> RunSummary:
    records = list(records)
    verdicts: dict[str, int] = {}
    for r in records:
        for c in r.checks:
            verdicts[c.verdict] = verdicts.get(c.verdict, 0) + 1
    return RunSummary(len(records), sum(len(r.checks) for r in records), verdicts,
                      sum(r.violations for r in records))


def csv_text(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    w.writerows(rows)
    return buf.getvalue()


def render(records: list[VerificationRecord], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps([r.to_dict() for r in records], indent=1, sort_keys=True) + "\n"
    return csv_text(CSV_COLUMNS, (row for r in records for row in r.rows()))


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write to a sibling temp file then rename, so no partial report survives."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# tables


TABLE1_COLUMNS = ("row", "lambda", "mu", "x", "printed_n", "classified_n", "probed_n", "agree")


def table1(iv: Interval) -> list[list[str]]:
    rows = []
    for label, p, printed in table1_rows(iv):
        n_c = classify_exactness(p.lam, p.mu, p.x, iv).degree
        n_p = probe_exactness(p).degree
        rows.append([label, fmt(p.lam), fmt(p.mu), fmt(p.x), fmt(printed), fmt(n_c), fmt(n_p),
                     fmt(n_c == n_p)])
    return rows


SWEEP_COLUMNS = ("lambda", "mu", "x", "classified_n", "probed_n", "agree")


def exactness_sweep(iv: Interval, n_lam: int = 50, n_x: int = 50,
                    mus: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)) -> list[list[str]]:
    """Grid plus the measure-zero rows (lam = 1, Simpson, x = x*(lam))."""
    lams = [i / (n_lam - 1) for i in range(n_lam)] + [1 / 3, 1 / 6, 0.25]
    xs = [iv.at(j / (n_x - 1)) for j in range(n_x)] + [iv.midpoint()]
    pts = {(lam, mu, x) for lam in lams for mu in mus for x in xs}
    for lam in lams:
        if lam <= 1 / 3:
            xs_ = optimal_node(lam, iv)
            pts |= {(lam, mu, xs_) for mu in mus} | {(lam, mu, iv.a + iv.b - xs_) for mu in mus}
    rows = []
    for lam, mu, x in sorted(pts):
        n_c = classify_exactness(lam, mu, x, iv).degree
        n_p = probe_exactness(RuleParams(lam, mu, x, iv)).degree
        rows.append([fmt(lam), fmt(mu), fmt(x), fmt(n_c), fmt(n_p), fmt(n_c == n_p)])
    return rows


@dataclass(frozen=True)
class SharpnessResult:
    x: float
    alpha: float
    abs_E: float
    bound: float
    rel_gap: float


def sharpness(x: float, alpha: float, iv: Interval) -> SharpnessResult:
    """|E(f*; 0, 1/2; x)| against the Lip-alpha bound it attains."""
    bound = guessab_schmeisser_bound(x, alpha, iv)
    f = gs_extremal_function(GSExtremalSpec(x, alpha, iv))
    e = abs(error_functional(f, RuleParams(0.0, 0.5, x, iv)))
    return SharpnessResult(x, alpha, e, bound, abs(e - bound) / bound)
