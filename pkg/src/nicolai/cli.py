"""Command-line front end.

Subcommands: ``poly``, ``verify``, ``table``, ``export-matrix``.
Exit codes: 0 ok, 1 verification mismatch, 2 configuration error,
3 size cap exceeded, 4 arithmetic disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import __version__
from .errors import (ArithmeticDisagreement, ConfigError, DomainError, ModelError,
                     NicolaiError, ResourceError, SiteRangeError)
from .fock import MonomialTerm, OperatorLetter, Kind, SuperchargeSpec
from .fock import nicolai_supercharge, z2_supercharge
from .homology import (DEFAULT_HAMILTONIAN_CAP, differential_matrix, hamiltonian_kernel_dim,
                       homology_report)
from .homology import size_cap as default_size_cap
from .hpl import homology_via_hpl
from .linalg import FieldSpec, random_primes
from .recursion import build_table, model_poly

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_ARITHMETIC = 4

METHODS = ("brute", "recursion", "hpl", "hamiltonian")
DEFAULT_HPL_CAP = 16

_LETTER = re.compile(r"^([ac])(\d+)$")
_COEFF = re.compile(r"^(-?\s*\d*)\s*\*?\s*(?=[ac]\d)")


def parse_supercharge(text: str, n: int) -> SuperchargeSpec:
    """Parse ``a1 c2 a3 + a3 c4 a5``: ``aK`` annihilates site K, ``cK`` creates.

    A term may carry a leading integer coefficient (``-a1 a2 a3``, ``2*a1 c2 a3``).
    """
    terms = []
    chunks = text.split("+") if text.strip() else []
    for chunk in chunks:
        chunk = chunk.strip()
        if not chunk:
            raise ConfigError(f"empty term in {text!r}")
        coeff = 1
        m = _COEFF.match(chunk)
        if m.group(1):
            raw = m.group(1).replace(" ", "")
            coeff = -1 if raw == "-" else int(raw)
            chunk = chunk[m.end():]
        letters = []
        for tok in chunk.split():
            lm = _LETTER.match(tok)
            if not lm:
                raise ConfigError(f"bad operator letter {tok!r}; use aK or cK")
            kind = Kind.ANNIHILATE if lm.group(1) == "a" else Kind.CREATE
            site = int(lm.group(2))
            if not 1 <= site <= n:
                raise ConfigError(f"site {site} outside 1..{n}")
            letters.append(OperatorLetter(site, kind))
        try:
            terms.append(MonomialTerm(tuple(letters), coeff))
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if not terms:
        raise ConfigError("custom supercharge has no terms")
    try:
        return SuperchargeSpec.from_terms(n, terms)
    except NicolaiError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class RunConfig:
    model: str
    sizes: list[int]
    method: str = "auto"
    field: str = "two-prime"
    prime: Optional[int] = None
    output: str = "json"
    size_cap: int = dc_field(default_factory=default_size_cap)
    threads: int = dc_field(default_factory=lambda: os.cpu_count() or 1)
    seed: Optional[int] = 0
    supercharge: Optional[str] = None
    oracles: tuple[str, ...] = ()
    oracle_cap: int = DEFAULT_HAMILTONIAN_CAP
    hpl_cap: int = DEFAULT_HPL_CAP
    timings: bool = False

    def __post_init__(self) -> None:
        if self.model not in ("nicolai", "z2", "custom"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.model == "custom" and not self.supercharge:
            raise ConfigError("model 'custom' needs --supercharge")
        if self.method not in ("auto", "all") + METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.method == "recursion" and self.model == "custom":
            raise ConfigError("no recursion is known for custom supercharges")
        if self.field not in ("two-prime", "prime", "rational"):
            raise ConfigError(f"unknown field {self.field!r}")
        if self.field == "prime" and self.prime is None:
            raise ConfigError("field 'prime' needs --prime")
        if self.method == "hamiltonian":
            self.field = "rational"
        for s in self.sizes:
            if s < 0:
                raise ConfigError(f"negative size {s}")
            if self.model == "nicolai" and (s < 3 or s % 2 == 0):
                raise ConfigError(f"Nicolai sizes are odd and >= 3, got {s}")
        if self.threads < 1:
            raise ConfigError("thread count must be positive")

    def field_spec(self) -> FieldSpec:
        if self.field == "rational":
            return FieldSpec.rational()
        if self.field == "prime":
            return FieldSpec.prime(self.prime)
        return FieldSpec("two_prime", random_primes(2, self.seed))

    def supercharge_for(self, n: int) -> SuperchargeSpec:
        if self.model == "nicolai":
            return nicolai_supercharge((n - 1) // 2)
        if self.model == "z2":
            return z2_supercharge(n)
        return parse_supercharge(self.supercharge or "", n)

    def header(self, command: str) -> dict:
        fs = self.field_spec()
        out = {
            "command": command,
            "version": __version__,
            "model": self.model,
            "field": self.field,
            "primes": list(fs.primes),
            "seed": self.seed,
            "timings": {},
        }
        if self.model == "custom":
            out["supercharge"] = self.supercharge
        return out


def _result(method: str, coeffs: Sequence[int], field_name: str,
            elapsed: Optional[float], with_timings: bool) -> dict:
    row = {
        "method": method,
        "coefficients": [str(c) for c in coeffs],
        "count": str(sum(coeffs)),
        "field": field_name,
    }
    if with_timings and elapsed is not None:
        row["timings"] = {"total": round(elapsed, 6)}
    return row


def _run_methods(cfg: RunConfig, n: int, methods: Sequence[str]) -> tuple[list[dict], list[dict]]:
    """Evaluate each method at size ``n``; returns (results, skipped)."""
    Q = cfg.supercharge_for(n)
    fs = cfg.field_spec()
    results, skipped = [], []
    for method in methods:
        t0 = time.perf_counter()
        if method == "recursion":
            if cfg.model == "custom":
                skipped.append({"method": method, "reason": "no recursion for custom supercharges"})
                continue
            coeffs = model_poly(cfg.model, n).padded(n + 1)
            fname = "none"
        elif method == "brute":
            if n > cfg.size_cap:
                raise ResourceError(f"n={n} exceeds the brute-force size cap {cfg.size_cap}")
            rep = homology_report(Q, n, fs, model=cfg.model, cap=cfg.size_cap, jobs=cfg.threads)
            coeffs = rep.homology_dims
            fname = cfg.field
        elif method == "hpl":
            if n > cfg.hpl_cap:
                skipped.append({"method": method, "reason": f"n={n} above hpl cap {cfg.hpl_cap}"})
                continue
            coeffs = homology_via_hpl(Q, n, fs).padded(n + 1)
            fname = cfg.field
        elif method == "hamiltonian":
            if n > cfg.oracle_cap:
                skipped.append({"method": method,
                                "reason": f"n={n} above oracle cap {cfg.oracle_cap}"})
                continue
            coeffs = [hamiltonian_kernel_dim(Q, n, d, cap=cfg.oracle_cap) for d in range(n + 1)]
            fname = "rational"
        else:
            raise ConfigError(f"unknown method {method!r}")
        results.append(_result(method, coeffs, fname, time.perf_counter() - t0, cfg.timings))
    return results, skipped


def _agree(results: Sequence[dict]) -> bool:
    return len({tuple(r["coefficients"]) for r in results}) <= 1


def cmd_poly(cfg: RunConfig) -> tuple[int, str]:
    if len(cfg.sizes) != 1:
        raise ConfigError("poly takes exactly one size")
    n = cfg.sizes[0]
    method = cfg.method
    note = None
    if method == "auto":
        if n <= cfg.size_cap:
            method = "all"
        elif cfg.model == "custom":
            raise ResourceError(f"n={n} exceeds the brute-force size cap {cfg.size_cap}")
        else:
            method = "recursion"
            note = "unverified: above brute-force cap"
    if method == "all":
        methods = list(METHODS) if cfg.model != "custom" else ["brute", "hpl", "hamiltonian"]
    else:
        methods = [method]
    if method == "recursion" and n > cfg.size_cap and note is None:
        note = "unverified: above brute-force cap"
    results, skipped = _run_methods(cfg, n, methods)
    if not results:
        raise ResourceError("; ".join(s["reason"] for s in skipped))
    agree = _agree(results)
    doc = cfg.header("poly")
    doc.update({
        "size": n,
        "method": method,
        "coefficients": results[0]["coefficients"] if results else [],
        "count": results[0]["count"] if results else "0",
        "results": results,
        "skipped": skipped,
        "agree": agree,
        "verified": agree and len(results) >= 2,
    })
    if note:
        doc["note"] = note
    code = EXIT_OK if agree else EXIT_ARITHMETIC
    return code, _render_poly(doc, cfg.output)


def _render_poly(doc: dict, output: str) -> str:
    if output == "json":
        return json.dumps(doc, indent=2) + "\n"
    if output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "size", "method", "count", "coefficients"])
        for r in doc["results"]:
            w.writerow([doc["model"], doc["size"], r["method"], r["count"],
                        " ".join(r["coefficients"])])
        return buf.getvalue()
    lines = [f"{doc['model']} size={doc['size']} field={doc['field']}"]
    for r in doc["results"]:
        lines.append(f"  {r['method']:<12} [{', '.join(r['coefficients'])}]  count={r['count']}")
    for s in doc["skipped"]:
        lines.append(f"  {s['method']:<12} skipped: {s['reason']}")
    if "note" in doc:
        lines.append(f"  {doc['note']}")
    lines.append("  agree" if doc["agree"] else "  DISAGREE")
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    if cfg.model == "custom":
        raise ConfigError("verify compares against the recursion; pick nicolai or z2")
    for n in cfg.sizes:
        if n > cfg.size_cap:
            raise ResourceError(f"n={n} exceeds the brute-force size cap {cfg.size_cap}")
    rows = []
    lines = []
    all_pass = True
    for n in cfg.sizes:
        methods = ["brute", "recursion"]
        skipped = []
        for oracle in cfg.oracles:
            cap = cfg.oracle_cap if oracle == "hamiltonian" else cfg.hpl_cap
            if n <= cap:
                methods.append(oracle)
            else:
                skipped.append({"method": oracle, "reason": f"n={n} above {oracle} cap {cap}"})
        results, more = _run_methods(cfg, n, methods)
        skipped.extend(more)
        ok = _agree(results) and len(results) >= 2
        all_pass &= ok
        status = "PASS" if ok else "FAIL"
        rows.append({"size": n, "status": status, "results": results, "skipped": skipped})
        used = ",".join(r["method"] for r in results)
        extra = "".join(f"; skipped {s['method']} ({s['reason']})" for s in skipped)
        lines.append(f"{status} {cfg.model} n={n} [{used}] "
                     f"coefficients=[{', '.join(results[0]['coefficients'])}]{extra}")
    doc = cfg.header("verify")
    doc.update({"sizes": list(cfg.sizes), "passed": all_pass, "rows": rows})
    summary = json.dumps(doc, indent=2) + "\n"
    code = EXIT_OK if all_pass else EXIT_MISMATCH
    if cfg.output == "json":
        return code, summary
    return code, "\n".join(lines) + "\n" + summary


def cmd_table(cfg: RunConfig) -> tuple[int, str]:
    if cfg.model == "custom":
        raise ConfigError("tables exist only for nicolai and z2")
    max_size = max(cfg.sizes)
    table = build_table(cfg.model, max_size)
    if not table.consistent():
        return EXIT_ARITHMETIC, "count recursion disagrees with polynomial recursion\n"
    if cfg.output == "csv":
        return EXIT_OK, table.to_csv()
    if cfg.output == "text":
        lines = [f"{s}\t{c}\t{' '.join(map(str, co))}" for s, c, co in table.rows()]
        return EXIT_OK, "\n".join(lines) + "\n"
    doc = cfg.header("table")
    doc.update({"max_size": max_size, "rows": table.to_json_obj()})
    return EXIT_OK, json.dumps(doc, indent=2) + "\n"


def cmd_export_matrix(cfg: RunConfig, degree: int, path: Optional[str] = None) -> tuple[int, str]:
    n = cfg.sizes[0]
    if n > cfg.size_cap:
        raise ResourceError(f"n={n} exceeds the brute-force size cap {cfg.size_cap}")
    Q = cfg.supercharge_for(n)
    text = differential_matrix(Q, n, degree).to_triplet_text()
    if path is None or path == "-":
        return EXIT_OK, text
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    return EXIT_OK, ""


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nicolai", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--model", choices=["nicolai", "z2", "custom"], required=True)
        p.add_argument("--supercharge", help="custom supercharge, e.g. 'a1 c2 a3 + a3 c4 a5'")
        p.add_argument("--field", choices=["two-prime", "prime", "rational"], default="two-prime")
        p.add_argument("--prime", type=int, help="modulus for --field prime")
        p.add_argument("--seed", type=int, default=0, help="seed for random prime selection")
        p.add_argument("--size-cap", type=int, default=None,
                       help="brute-force cap on sites (default $NICOLAI_SIZE_CAP or 24)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings (output is then not byte-reproducible)")

    p = sub.add_parser("poly", help="Poincaré polynomial of one chain")
    common(p)
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--method", choices=["auto", "all"] + list(METHODS), default="auto")
    p.add_argument("--format", dest="output", choices=["json", "csv", "text"], default="json")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_HAMILTONIAN_CAP)
    p.add_argument("--hpl-cap", type=int, default=DEFAULT_HPL_CAP)

    p = sub.add_parser("verify", help="brute force against the recursion over a size range")
    common(p)
    p.add_argument("--max-sites", type=int, required=True)
    p.add_argument("--min-sites", type=int, default=None)
    p.add_argument("--oracle", action="append", choices=["hamiltonian", "hpl"], default=[])
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_HAMILTONIAN_CAP)
    p.add_argument("--hpl-cap", type=int, default=DEFAULT_HPL_CAP)
    p.add_argument("--format", dest="output", choices=["json", "text"], default="text")

    p = sub.add_parser("table", help="recursion table of counts and polynomials")
    common(p)
    p.add_argument("--max-sites", type=int, required=True)
    p.add_argument("--format", dest="output", choices=["json", "csv", "text"], default="csv")

    p = sub.add_parser("export-matrix", help="write one differential block as triplets")
    common(p)
    p.add_argument("--sites", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--output", dest="path", default="-")
    return ap


def _sizes(args: argparse.Namespace) -> list[int]:
    if args.command in ("poly", "export-matrix"):
        return [args.sites]
    hi = args.max_sites
    if args.model == "nicolai":
        lo = 3 if args.command == "table" or args.min_sites is None else args.min_sites
        if hi < 3:
            raise ConfigError("Nicolai sizes start at 3")
        return [s for s in range(max(lo, 3), hi + 1) if s % 2 == 1]
    lo = 0 if args.command == "table" or args.min_sites is None else args.min_sites
    return list(range(lo, hi + 1))


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = dict(
        model=args.model,
        sizes=_sizes(args),
        field=args.field,
        prime=args.prime,
        seed=args.seed,
        supercharge=args.supercharge,
        timings=args.timings,
    )
    if args.size_cap is not None:
        kw["size_cap"] = args.size_cap
    if args.threads is not None:
        kw["threads"] = args.threads
    if args.command == "poly":
        kw.update(method=args.method, output=args.output, oracle_cap=args.oracle_cap,
                  hpl_cap=args.hpl_cap)
    elif args.command == "verify":
        kw.update(output=args.output, oracles=tuple(dict.fromkeys(args.oracle)),
                  oracle_cap=args.oracle_cap, hpl_cap=args.hpl_cap)
    elif args.command == "table":
        kw.update(output=args.output)
    return RunConfig(**kw)


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, str]:
    """Parse and execute; returns ``(exit code, stdout text, stderr text)``."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG, "", ""
    try:
        cfg = config_from_args(args)
        if args.command == "poly":
            code, out = cmd_poly(cfg)
        elif args.command == "verify":
            code, out = cmd_verify(cfg)
        elif args.command == "table":
            code, out = cmd_table(cfg)
        else:
            code, out = cmd_export_matrix(cfg, args.degree, args.path)
    except (ConfigError, DomainError, SiteRangeError, ModelError) as exc:
        return EXIT_CONFIG, "", f"error: {exc}\n"
    except ResourceError as exc:
        return EXIT_RESOURCE, "", f"error: {exc}\n"
    except ArithmeticDisagreement as exc:
        return EXIT_ARITHMETIC, "", f"error: {exc}\n"
    except OSError as exc:
        return EXIT_CONFIG, "", f"error: {exc}\n"
    return code, out, ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
