"""Batch runner: ``lattlang run CONFIG`` and ``lattlang validate CONFIG``.

A config is a JSON object {"experiment": kind, "params": {...}, "seed": N,
"out": DIR}.  Every parameter is checked before anything is computed, and
artifacts are written only once the whole experiment has finished, so a bad
config never leaves partial output.  Data files carry no timestamps; the
same config and seed give the same bytes.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .alphabet import DEFAULT_ALPHABET
from .dynamics import DimensionCapExceeded, UnitarityError
from .expressions import Expression, to_text, word_at
from .godel import decode, encode, site_value
from .godel import to_text as numeral_text
from .ink import LevelSpectrum, compose_page, dumps_page, glyph_sites, glyphs_from_records, read_cost, repeated_read
from .stability import (
    check_monotonicity,
    classify_efficiency,
    counter_horizon,
    counter_source,
    tau_table,
    writer_source,
)
from .theory_engine import (
    Mode,
    Theory,
    check_proof,
    enumerate_theorems,
    generate_complexity_pair,
    shortest_inconsistency_proof,
)


class ConfigError(ValueError):
    pass


# -- parameter schemas -----------------------------------------------------------

def _int(lo: int | None = None, hi: int | None = None):
    def check(name, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{name} must be an integer, got {v!r}")
        if lo is not None and v < lo or hi is not None and v > hi:
            raise ConfigError(f"{name}={v} outside [{lo}, {hi}]")
        return v
    return check


def _float(lo: float, hi: float | None = None):
    def check(name, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} must be a number, got {v!r}")
        if v < lo or hi is not None and v > hi:
            raise ConfigError(f"{name}={v} outside [{lo}, {hi}]")
        return float(v)
    return check


def _int_list(lo: int, hi: int):
    item = _int(lo, hi)

    def check(name, v):
        if not isinstance(v, list) or not v:
            raise ConfigError(f"{name} must be a nonempty list")
        return sorted({item(name, x) for x in v})
    return check


def _formula_list(name, v):
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise ConfigError(f"{name} must be a list of formula strings")
    try:
        Theory.of(v)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    return v


def _glyphs(name, v):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{name} must be a nonempty list of glyph records")
    try:
        return glyphs_from_records(v)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: bad glyph record ({exc})") from None


def _energies(name, v):
    try:
        return LevelSpectrum(tuple(v))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


SCHEMAS: dict[str, dict[str, tuple[Callable, Any]]] = {
    "writer_tau": {
        "n_list": (_int_list(1, 64), list(range(2, 11))),
        "m_list": (_int_list(1, 52), [1, 10, 20, 30]),
        "strings_per_n": (_int(1, 16), 2),
        "horizon": (_int(2, 1 << 16), 16),
        "horizon_cap": (_int(2, 1 << 16), 4096),
    },
    "efficiency_scan": {
        "writer_n_list": (_int_list(1, 64), list(range(2, 11))),
        "counter_n_list": (_int_list(1, 12), list(range(4, 10))),
        "m": (_int(1, 52), 10),
        "horizon_cap": (_int(2, 1 << 16), 8192),
        "margin": (_float(1.0), 2.0),
    },
    "theorem_enum": {
        "axioms": (_formula_list, ["(0=0)"]),
        "budget": (_int(1, 10 ** 7), 2000),
        "bound": (_int(2, 12), 6),
    },
    "complexity_pair": {
        "n_axioms": (_int(2, 8), 4),
        "threshold": (_int(2, 8), 4),
        "max_bits_gap": (_int(0, 64), 8),
        "bound": (_int(2, 10), 8),
        "theorem_budget": (_int(1, 10 ** 6), 20000),
    },
    "godel_roundtrip": {
        "count": (_int(1, 10 ** 6), 1000),
        "max_support": (_int(1, 64), 20),
        "site_range": (_int(0, 64), 12),
    },
    "ink_demo": {
        "glyphs": (_glyphs, [{"kind": "vbar", "x": 0, "y": 0, "n": 3},
                             {"kind": "diag", "x": 4, "y": 0, "n": 3},
                             {"kind": "tee", "x": 10, "y": 0, "n": 3, "m": 1}]),
        "energies": (_energies, [0.0, 1.0, 2.5]),
        "kT": (_float(1e-9), 0.2),
        "reads": (_int(0, 10 ** 6), 10),
        "flip_prob": (_float(0.0, 1.0), 0.01),
        "symbols_read": (_int(0, 64), 3),
    },
}


@dataclass
class RunConfig:
    experiment: str
    params: dict
    seed: int = 0
    out: str = "runs"
    raw_params: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"experiment": self.experiment, "params": self.raw_params, "seed": self.seed}


@dataclass
class RunReport:
    config: dict
    records: dict
    artifacts: list[str]
    wall_time: float


def validate_config(doc: Any, seed: int | None = None, out: str | None = None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - {"experiment", "params", "seed", "out"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kind = doc.get("experiment")
    if kind not in SCHEMAS:
        raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {sorted(SCHEMAS)}")
    raw = doc.get("params", {})
    if not isinstance(raw, dict):
        raise ConfigError("params must be an object")
    schema = SCHEMAS[kind]
    extra = set(raw) - set(schema)
    if extra:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(extra)}")
    merged = {k: raw.get(k, default) for k, (_, default) in schema.items()}
    params = {k: schema[k][0](k, v) for k, v in merged.items()}
    seed = doc.get("seed", 0) if seed is None else seed
    _int(0)("seed", seed)
    out = doc.get("out", "runs") if out is None else out
    if not isinstance(out, str) or not out:
        raise ConfigError("out must be a directory path")
    return RunConfig(kind, params, seed, out, merged)


# -- experiments -------------------------------------------------------------------
# each returns (records, {filename: text})

def _random_strings(rng: random.Random, n: int, count: int) -> list[tuple[str, ...]]:
    symbols = [s for s in DEFAULT_ALPHABET if s != DEFAULT_ALPHABET.spacer]
    return [tuple(rng.choice(symbols) for _ in range(n)) for _ in range(count)]


def _writer_tau(p: dict, seed: int):
    rng = random.Random(seed)
    strings = {n: _random_strings(rng, n, p["strings_per_n"]) for n in p["n_list"]}
    table = tau_table(writer_source(), strings, p["m_list"], p["horizon"], p["horizon_cap"], "writer")
    verdicts = {str(m): classify_efficiency(table, m).to_record() for m in p["m_list"]}
    exact = all(e.value == n - 1 for (n, _), e in table.entries.items())
    records = {"tau_equals_n_minus_1": exact, "monotonicity_violations": len(check_monotonicity(table)),
               "classification": verdicts, "strings": {str(n): ["".join(s) for s in v] for n, v in strings.items()}}
    return records, {"tau_table.csv": table.to_csv()}


def _efficiency_scan(p: dict, seed: int):
    rng = random.Random(seed)
    m = p["m"]
    w_strings = {n: _random_strings(rng, n, 1) for n in p["writer_n_list"]}
    writer = tau_table(writer_source(), w_strings, [m], 16, p["horizon_cap"], "writer")
    c_strings = {n: [("0",) * n] for n in p["counter_n_list"]}
    counter = tau_table(counter_source(), c_strings, [m], counter_horizon, p["horizon_cap"], "counter")
    records = {
        "writer": classify_efficiency(writer, m, p["margin"]).to_record(),
        "counter": classify_efficiency(counter, m, p["margin"]).to_record(),
    }
    return records, {"writer_tau.csv": writer.to_csv(), "counter_tau.csv": counter.to_csv()}


def _theorem_enum(p: dict, seed: int):
    T = Theory.of(p["axioms"])
    stream = enumerate_theorems(T, p["budget"])
    blocks, sound, count = [], True, 0
    for em in stream:
        count += 1
        if em.mode is Mode.CONSISTENT or em.lines == stream.flipped_at:
            sound &= check_proof(em.lines, T)
        blocks.append(f"# {count} {em.mode.value}\n" + "".join(to_text(word_at(f)) + "\n" for f in em.lines))
    records = {
        "axioms": T.sorted_axioms(), "mode": stream.mode.value, "steps": stream.steps, "emitted": count,
        "flipped_at": list(stream.flipped_at) if stream.flipped_at else None,
        "all_consistent_proofs_check": sound,
        "shortest_inconsistency": shortest_inconsistency_proof(T, p["bound"]),
    }
    return records, {"proofs.txt": "\n".join(blocks)}


def _complexity_pair(p: dict, seed: int):
    pair = generate_complexity_pair(seed, p["n_axioms"], threshold=p["threshold"], max_bits_gap=p["max_bits_gap"],
                                    bound=p["bound"], theorem_budget=p["theorem_budget"])
    return pair.to_record(), {}


def _godel_roundtrip(p: dict, seed: int):
    rng = random.Random(seed)
    symbols = [s for s in DEFAULT_ALPHABET if s != DEFAULT_ALPHABET.spacer]
    r = p["site_range"]
    lines = ["expression,numeral,value"]
    ok = 0
    for _ in range(p["count"]):
        size = rng.randint(0, min(p["max_support"], 2 * r + 1))
        e = Expression({j: rng.choice(symbols) for j in rng.sample(range(-r, r + 1), size)})
        num = encode(e)
        ok += decode(num) == e
        lines.append(f"{to_text(e)},{numeral_text(num)},{num.value}")
    records = {"count": p["count"], "round_trips": ok,
               "spot_checks": {"3*13^2": str(site_value("v", 2, 13, _digits())),
                               "5*10^-1": str(site_value("r", -1, 10, _digits()))}}
    return records, {"numerals.csv": "\n".join(lines) + "\n"}


def _digits():
    from .alphabet import DigitMap
    return DigitMap.canonical(DEFAULT_ALPHABET)


def _ink_demo(p: dict, seed: int):
    page = compose_page(p["glyphs"], p["energies"], p["kT"])
    moved, report = repeated_read(page, p["reads"], p["flip_prob"], seed)
    n = p["symbols_read"]
    records = {
        "ground_prob": page.density.ground, "level_probs": list(page.density.probabilities),
        "glyph_sites": [sorted(glyph_sites(g)) for g in page.glyphs],
        "read_cost": {rule: read_cost(rule, n, DEFAULT_ALPHABET.k).__dict__
                      for rule in ("position_only", "content_dependent")},
        "repeated_read": report.to_record(),
    }
    return records, {"page.csv": dumps_page(page), "page_after_reads.csv": dumps_page(moved)}


EXPERIMENTS = {
    "writer_tau": _writer_tau,
    "efficiency_scan": _efficiency_scan,
    "theorem_enum": _theorem_enum,
    "complexity_pair": _complexity_pair,
    "godel_roundtrip": _godel_roundtrip,
    "ink_demo": _ink_demo,
}


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=str) + "\n"


def run_experiment(cfg: RunConfig | dict) -> RunReport:
    if isinstance(cfg, dict):
        cfg = validate_config(cfg)
    t0 = time.perf_counter()
    records, files = EXPERIMENTS[cfg.experiment](cfg.params, cfg.seed)
    files = dict(files)
    files["report.json"] = _dump_json({"config": cfg.echo(), "records": records,
                                       "artifacts": sorted(files)})
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(files):
        path = out / name
        path.write_text(files[name], encoding="utf-8")
        paths.append(str(path))
    return RunReport(cfg.echo(), records, paths, time.perf_counter() - t0)


def _load(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lattlang", description="Run lattice-language experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "validate"):
        cmd = sub.add_parser(name)
        cmd.add_argument("config")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    try:
        cfg = validate_config(_load(args.config), args.seed, args.out)
        if args.command == "validate":
            print(f"ok: {cfg.experiment} {json.dumps(cfg.echo()['params'], sort_keys=True, ensure_ascii=False)}")
            return 0
        report = run_experiment(cfg)
    except (ConfigError, DimensionCapExceeded, UnitarityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in report.artifacts:
        print(path)
    print(f"done in {report.wall_time:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
