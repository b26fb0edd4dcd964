"""Command-line entry point: ``logicalnm <command> [options]``.

Every command writes files named ``<prefix><suffix>`` plus a JSON run
manifest ``<prefix>.manifest.json``. The default prefix is
``$LOGICALNM_OUTPUT_DIR/<command>-<code>`` (current directory if unset).

Exit codes: 0 success, 2 configuration error, 3 capacity limit,
4 invariant or validation failure. Failures print one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import svg
from .channels import EQUAL_TOL, bitflip_confusion, encoding_unitary, encoding_unitary_table, noisy_recovery_map
from .code import StabilizerCode, get_code
from .errors import (
    CapacityError,
    CodeValidationError,
    DimensionError,
    DomainError,
    HypothesisError,
    SearchExhaustedError,
)
from .experiments import (
    COMPOSABILITY_TOL,
    DecayRecord,
    leading_order_report,
    polarization_sequence,
    sufficiency_suite,
    verify_theorem1,
)
from .markov import cube_graph, polarization_vectors, spectral_summary, transition_matrix

OUTPUT_DIR_ENV = "LOGICALNM_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_INVARIANT = 0, 2, 3, 4
FORMATS = ("csv", "json", "dot", "svg")
SUFFICIENCY_TRIALS = 20

COMMAND_FORMATS = {
    "decay": ({"csv", "svg", "json"}, {"csv", "svg"}),
    "composability": ({"csv", "json"}, {"csv", "json"}),
    "verify-theorem1": ({"json"}, {"json"}),
    "transition-matrix": ({"json", "csv"}, {"json", "csv"}),
    "encoding-unitary": ({"csv", "json"}, {"csv"}),
    "cube-graph": ({"dot", "json"}, {"dot", "json"}),
    "leading-order": ({"csv"}, {"csv"}),
}
DEFAULT_P = {"leading-order": [1e-2, 1e-3, 1e-4]}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    code: str = "rep3"
    p: list[float] = field(default_factory=lambda: [0.1])
    rounds: int = 60
    output: str | None = None
    formats: set[str] = field(default_factory=set)
    seed: int = 0
    log_y: bool = False

    def validate(self) -> None:
        if self.command not in COMMAND_FORMATS:
            raise ConfigError(f"unknown command {self.command!r}")
        for p in self.p:
            if not 0 <= p <= 1:
                raise ConfigError(f"p must lie in [0, 1], got {p}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be at least 1, got {self.rounds}")
        allowed, _ = COMMAND_FORMATS[self.command]
        bad = sorted(self.formats - allowed)
        if bad:
            raise ConfigError(f"format(s) {', '.join(bad)} not available for {self.command}")

    def prefix(self, code: StabilizerCode) -> Path:
        if self.output:
            return Path(self.output)
        return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{self.command}-{code.name}"


def _p_tag(p: float) -> str:
    return "p" + format(p, "g")


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Outputs:
    def __init__(self, prefix: Path, formats: set[str]):
        self.prefix = prefix
        self.formats = formats
        self.written: dict[str, str] = {}

    def emit(self, fmt: str, suffix: str, render: Callable[[], str]) -> None:
        if fmt not in self.formats:
            return
        path = Path(f"{self.prefix}{suffix}")
        text = render()
        write_atomic(path, text)
        self.written[path.name] = hashlib.sha256(text.encode()).hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- commands -----------------------------------------------------------------

def decay_chart(records: Sequence[DecayRecord], log_y: bool) -> str:
    def series(values_of):
        return [svg.Series(f"p={r.p:g}", list(range(len(values_of(r)))), values_of(r)) for r in records]

    code = records[0].code_name
    panels = [
        svg.Panel(f"{code}: per-round logical error rate", "round m", "eps_m", series(lambda r: r.eps), log_y),
        svg.Panel(f"{code}: change in error rate", "round m", "|eps_(m+1) - eps_m|", series(lambda r: r.deps), log_y),
    ]
    return svg.render(panels)


def run_decay(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    records = [polarization_sequence(code, p, cfg.rounds) for p in cfg.p]
    summary = []
    for rec in records:
        out.emit("csv", f"_{_p_tag(rec.p)}.csv", rec.to_csv)
        q = rec.q
        summary.append({
            "p": rec.p,
            "q_1": q[1],
            "q_final": q[-1],
            "q_monotone_from_1": all(b <= a + 1e-15 for a, b in zip(q[1:-1], q[2:])),
        })
    out.emit("svg", ".svg", lambda: decay_chart(records, cfg.log_y))
    out.emit("json", ".json", lambda: _dumps(summary))
    return {"runs": summary}


def run_composability(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    trials = sufficiency_suite(code, SUFFICIENCY_TRIALS, cfg.seed)

    def render_csv() -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "with_recovery", "without_recovery"])
        for i, t in enumerate(trials):
            w.writerow([i, repr(t.with_recovery), repr(t.without_recovery)])
        return buf.getvalue()

    summary = {
        "trials": len(trials),
        "max_with_recovery": max(t.with_recovery for t in trials),
        "max_without_recovery": max(t.without_recovery for t in trials),
        "composable_with_recovery": all(t.with_recovery <= COMPOSABILITY_TOL for t in trials),
        "violations_without_recovery": sum(t.without_recovery > COMPOSABILITY_TOL for t in trials),
    }
    out.emit("csv", ".csv", render_csv)
    out.emit("json", ".json", lambda: _dumps(summary))
    return summary


def run_verify_theorem1(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    verdicts = []
    for p in cfg.p:
        result = verify_theorem1(code, bitflip_confusion(code, p))
        d = result.to_dict()
        d["p"] = p
        verdicts.append(d)
    out.emit("json", ".json", lambda: _dumps(verdicts[0] if len(verdicts) == 1 else verdicts))
    return {"violated": [v["violated"] for v in verdicts]}


def run_transition_matrix(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    summary = []
    for p in cfg.p:
        tm = transition_matrix(code, noisy_recovery_map(code, bitflip_confusion(code, p)))
        if code.k == 1:
            initial, observable = polarization_vectors(code, tm)
            spectrum = spectral_summary(tm, initial, observable)
        else:
            spectrum = spectral_summary(tm)
        out.emit("json", f"_{_p_tag(p)}.json", lambda: _dumps(tm.to_dict()))
        out.emit("csv", f"_{_p_tag(p)}_eigenvalues.csv", spectrum.to_csv)
        summary.append({
            "p": p,
            "second_largest_modulus": spectrum.second_largest_modulus,
            "asymptotic_rate": spectrum.asymptotic_rate,
            "convergence_ratio": spectrum.convergence_ratio,
        })
    return {"runs": summary}


def run_encoding_unitary(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    rows = encoding_unitary_table(code)
    u = encoding_unitary(code)
    unitarity = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if unitarity > 1e-12:
        raise DomainError(f"encoding unitary fails unitarity by {unitarity:.3g}")

    def render_csv() -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["logical", "syndrome", "encoded"])
        for row in rows:
            w.writerow([row["logical"], row["syndrome"], row["encoded"] or ""])
        return buf.getvalue()

    out.emit("csv", ".csv", render_csv)
    out.emit("json", ".json", lambda: _dumps(rows))
    return {"rows": len(rows), "unitarity_error": unitarity}


def run_cube_graph(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    edges = 0
    for p in cfg.p:
        graph = cube_graph(code, p)
        edges += len(graph.edges)
        out.emit("dot", f"_{_p_tag(p)}.dot", lambda: graph.to_dot(code.name))
        out.emit("json", f"_{_p_tag(p)}.json", lambda: graph.to_json() + "\n")
    return {"edges": edges}


def run_leading_order(cfg: RunConfig, code: StabilizerCode, out: Outputs) -> dict:
    report = leading_order_report(code, cfg.p)
    out.emit("csv", ".csv", report.to_csv)
    return {"ratios": [row.ratio for row in report.rows], "flip_fraction": report.flip_fraction}


COMMANDS: dict[str, Callable[[RunConfig, StabilizerCode, Outputs], dict]] = {
    "decay": run_decay,
    "composability": run_composability,
    "verify-theorem1": run_verify_theorem1,
    "transition-matrix": run_transition_matrix,
    "encoding-unitary": run_encoding_unitary,
    "cube-graph": run_cube_graph,
    "leading-order": run_leading_order,
}


def run(cfg: RunConfig) -> dict:
    """Execute one configured command; returns the run manifest."""
    cfg.validate()
    try:
        code = get_code(cfg.code)
    except OSError as exc:
        raise ConfigError(f"cannot read code file {cfg.code!r}: {exc.strerror}") from None
    formats = cfg.formats or COMMAND_FORMATS[cfg.command][1]
    out = Outputs(cfg.prefix(code), set(formats))
    results = COMMANDS[cfg.command](cfg, code, out)
    manifest = {
        "command": cfg.command,
        "code": code.name,
        "code_fingerprint": code.fingerprint(),
        "p": cfg.p,
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "log_y": cfg.log_y,
        "tolerances": {"channel_equality": EQUAL_TOL, "composability": COMPOSABILITY_TOL},
        "files": out.written,
        "results": results,
    }
    write_atomic(Path(f"{out.prefix}.manifest.json"), _dumps(manifest))
    return manifest


# --- argument parsing -----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(message)


def _parse_p(values: Sequence[str]) -> list[float]:
    out = []
    for v in values:
        for item in v.split(","):
            if item:
                try:
                    out.append(float(item))
                except ValueError:
                    raise ConfigError(f"invalid probability {item!r}") from None
    if not out:
        raise ConfigError("no probability given")
    return out


def _parse_formats(value: str) -> set[str]:
    fmts = {f.strip() for f in value.split(",") if f.strip()}
    bad = sorted(fmts - set(FORMATS))
    if bad:
        raise ConfigError(f"unknown format(s): {', '.join(bad)}")
    return fmts


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logicalnm", description="Effective logical channels of noisy error-correction rounds.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--code", default="rep3", help="rep3, five-qubit, or a code-definition file")
    parser.add_argument("--p", nargs="+", default=None, help="readout flip probability (several or comma-separated)")
    parser.add_argument("--rounds", type=int, default=60)
    parser.add_argument("--output", default=None, help=f"output path prefix (default ${OUTPUT_DIR_ENV}/<command>-<code>)")
    parser.add_argument("--format", dest="formats", default=None, help="comma-separated subset of csv,json,dot,svg")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--log-y", action="store_true", help="logarithmic y axis in charts")
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    p = _parse_p(ns.p) if ns.p is not None else list(DEFAULT_P.get(ns.command, [0.1]))
    formats = _parse_formats(ns.formats) if ns.formats is not None else set()
    return RunConfig(ns.command, ns.code, p, ns.rounds, ns.output, formats, ns.seed, ns.log_y)


def _fail(kind: str, status: int, message: str) -> int:
    print(json.dumps({"error": kind, "exit_code": status, "message": " ".join(str(message).split())}), file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        build_parser().print_help()
        return EXIT_OK
    try:
        manifest = run(parse_args(argv))
    except CapacityError as exc:
        return _fail("capacity", EXIT_CAPACITY, str(exc))
    except (CodeValidationError, DomainError, HypothesisError, SearchExhaustedError, DimensionError) as exc:
        return _fail("invariant", EXIT_INVARIANT, str(exc))
    except (ConfigError, ValueError, OSError) as exc:
        return _fail("config", EXIT_CONFIG, str(exc))
    for name in manifest["files"]:
        print(name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
