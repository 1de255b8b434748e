"""Command-line front end.

Every verb writes a table (CSV) or a report (JSON) whose leading metadata
echoes the full run configuration, so a run can be repeated exactly.

Exit codes: 0 success, 1 usage error, 2 invariant violation, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import acf as A
from . import closed_form as CF
from . import constellations as C
from . import optimality as O
from . import ranging as R
from .errors import SidelobeError
from .specs import (
    SpecError,
    parse_basis,
    parse_constellation,
    parse_float_range,
    parse_int_range,
    parse_targets,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3
CONSISTENCY_REL = 1e-8
MODE_ALIASES = {"periodic": "periodic", "aperiodic": "aperiodic", "doppler": "doppler_periodic"}


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _db(v: float) -> float:
    return 10 * math.log10(v) if v > 0 else float("-inf")


def _metadata(args, started: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return {
        "tool": "isac-sidelobe",
        "version": __version__,
        "config": config,
        "seed": getattr(args, "seed", None),
        "started_utc": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - started, 3),
    }


def _write(path: str, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _csv_text(meta: dict, header: list, rows: list) -> str:
    buf = io.StringIO()
    for key in ("tool", "version", "started_utc", "elapsed_s", "seed"):
        buf.write(f"# {key}: {meta[key]}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# -- acf ---------------------------------------------------------------------

ACF_HEADER = [
    "lag", "mean_sq", "stderr", "closed_form", "mean_sq_db", "closed_form_db",
    "mode", "scheme", "constellation", "n", "trials", "seed",
]


def _acf_rows(args, n: int):
    basis = parse_basis(args.scheme, n)
    c = parse_constellation(args.constellation)
    mode = MODE_ALIASES[args.mode]
    rep = CF.expected_profile(basis, c.kurtosis, mode)
    if not np.isclose(rep.eisl, rep.per_lag[1:].sum(), rtol=CONSISTENCY_REL, atol=1e-9 * rep.mainlobe):
        raise InvariantViolation(
            f"closed-form EISL {rep.eisl!r} disagrees with the per-lag sum {rep.per_lag[1:].sum()!r}"
        )
    if args.trials > 0:
        prof = A.monte_carlo_profile(basis, c, mode, args.trials, args.seed, args.threads)
        mean, se = prof.mean_sq, prof.stderr
    else:
        mean, se = np.full(n, np.nan), np.full(n, np.nan)
    lags = np.arange(n)
    cf = rep.per_lag
    if args.two_sided and mode == "aperiodic":
        lags = np.concatenate([-lags[:0:-1], lags])
        mean, se, cf = (np.concatenate([a[:0:-1], a]) for a in (mean, se, cf))
    rows = []
    for k, m, s, f in zip(lags, mean, se, cf):
        rows.append([
            int(k), _fmt(float(m)), _fmt(float(s)), _fmt(float(f)),
            _fmt(_db(m) if m == m else m), _fmt(_db(f)),
            args.mode, basis.label, c.label, n, args.trials, args.seed,
        ])
    return rows


def cmd_acf(args, started):
    sizes = parse_int_range(args.sweep_n) if args.sweep_n else [args.n]
    rows = []
    for n in sizes:
        rows.extend(_acf_rows(args, n))
    return _csv_text(_metadata(args, started), ACF_HEADER, rows)


# -- eisl --------------------------------------------------------------------

EISL_HEADER = [
    "n", "scheme", "constellation", "mode", "mu4", "eisl_closed_form", "mainlobe",
    "pslr_closed_form_db", "eisl_empirical", "pslr_empirical_db", "trials", "seed",
]


def cmd_eisl(args, started):
    rows = []
    for n in parse_int_range(args.n):
        for scheme in args.schemes.split(","):
            basis = parse_basis(scheme, n)
            for cspec in args.constellations.split(","):
                c = parse_constellation(cspec)
                for mode in args.modes.split(","):
                    mode = MODE_ALIASES.get(mode.strip())
                    if mode is None or mode == "doppler_periodic":
                        raise UsageError("eisl modes must be periodic and/or aperiodic")
                    rep = CF.expected_profile(basis, c.kurtosis, mode)
                    if not np.isclose(rep.eisl, rep.per_lag[1:].sum(), rtol=CONSISTENCY_REL,
                                      atol=1e-9 * rep.mainlobe):
                        raise InvariantViolation(f"EISL closed forms disagree for {scheme}/{cspec}/{mode}")
                    emp_eisl = emp_pslr = float("nan")
                    if args.trials > 0:
                        prof = A.monte_carlo_profile(basis, c, mode, args.trials, args.seed, args.threads)
                        emp_eisl, emp_pslr = A.eisl_empirical(prof), A.pslr(prof)
                    rows.append([
                        n, basis.label, c.label, mode, _fmt(c.kurtosis), _fmt(rep.eisl),
                        _fmt(rep.mainlobe), _fmt(CF.report_pslr(rep)),
                        _fmt(emp_eisl), _fmt(emp_pslr), args.trials, args.seed,
                    ])
    return _csv_text(_metadata(args, started), EISL_HEADER, rows)


# -- doppler -----------------------------------------------------------------

DOPPLER_HEADER = [
    "lag", "sc_doppler", "sc_doppler_stderr", "ofdm_pacf", "ofdm_pacf_stderr",
    "closed_form", "constellation", "n", "trials", "seed",
]


def cmd_doppler(args, started):
    c = parse_constellation(args.constellation)
    rep = O.doppler_duality_check(args.n, c, args.trials, args.seed)
    cf = CF.expected_pacf(parse_basis("ofdm", args.n), c.kurtosis).per_lag
    rows = [
        [k, _fmt(float(a)), _fmt(float(sa)), _fmt(float(b)), _fmt(float(sb)), _fmt(float(f)),
         c.label, args.n, args.trials, args.seed]
        for k, (a, sa, b, sb, f) in enumerate(zip(
            rep.sc_doppler.mean_sq, rep.sc_doppler.stderr, rep.ofdm_pacf.mean_sq, rep.ofdm_pacf.stderr, cf))
    ]
    text = _csv_text(_metadata(args, started), DOPPLER_HEADER, rows)
    if not (rep.dual_ok and rep.sc_ordering_ok):
        _write(args.out, text)
        raise InvariantViolation(
            f"Doppler duality failed (max z = {rep.max_z:.2f}, sc_ordering_ok = {rep.sc_ordering_ok})"
        )
    return text


# -- moments -----------------------------------------------------------------

def cmd_moments(args, started):
    out = []
    for cspec in args.constellations.split(","):
        c = parse_constellation(cspec)
        entry = {"constellation": c.label, "kurtosis": c.kurtosis, "class": C.classify(c).value,
                 "rotationally_symmetric": c.rotationally_symmetric}
        if isinstance(c, C.Constellation):
            p, s = c.probabilities, c.points
            entry.update(size=c.size, power=float(np.sum(p * np.abs(s) ** 2)),
                         abs_mean=float(abs(np.sum(p * s))), abs_pseudo_variance=float(abs(np.sum(p * s**2))))
        if args.n:
            entry["moment_matrix"] = C.moment_matrix(c, args.n).entries.tolist()
        out.append(entry)
    return json.dumps({"meta": _metadata(args, started), "constellations": out}, indent=2) + "\n"


# -- optimality --------------------------------------------------------------

def cmd_optimality(args, started):
    summary = O.verify_local_optimality(args.n, args.directions, args.seed, args.step, threads=args.threads)
    body = summary.as_dict()
    body["meta"] = _metadata(args, started)
    text = json.dumps(body, indent=2) + "\n"
    if not summary.passed:
        _write(args.out, text)
        raise InvariantViolation("OFDM stationarity check failed")
    return text


# -- ranging -----------------------------------------------------------------

RANGING_HEADER = ["snr_db", "target", "rmse_m", "trials", "scheme", "constellation", "cp"]


def cmd_ranging(args, started):
    basis = parse_basis(args.scheme, args.n)
    c = parse_constellation(args.constellation)
    scenario = R.RangingScenario(
        bandwidth=args.bandwidth_hz,
        n=args.n,
        targets=parse_targets(args.targets),
        snr_grid=parse_float_range(args.snr_db),
        basis=basis,
        constellation=c,
        cp=args.cp,
        trials=args.trials,
        seed=args.seed,
        min_separation=args.min_separation,
    )
    table = R.rmse_sweep(scenario)
    rows = [[_fmt(s), t, _fmt(r), n, basis.label, c.label, int(args.cp)] for s, t, r, n in table.rows()]
    return _csv_text(_metadata(args, started), RANGING_HEADER, rows)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isac-sidelobe", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, trials=1000):
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")

    a = sub.add_parser("acf", help="per-lag empirical and closed-form squared ACF")
    a.add_argument("--scheme", default="ofdm")
    a.add_argument("--constellation", default="qam:16")
    a.add_argument("--mode", choices=sorted(MODE_ALIASES), default="periodic")
    a.add_argument("--n", type=int, default=128)
    a.add_argument("--sweep-n", help="sizes to sweep, e.g. 64:512:x2")
    a.add_argument("--two-sided", action="store_true", help="mirror aperiodic lags to -(n-1)..n-1")
    common(a)
    a.set_defaults(func=cmd_acf)

    e = sub.add_parser("eisl", help="EISL / PSLR table over sizes, schemes and alphabets")
    e.add_argument("--schemes", default="sc,ofdm")
    e.add_argument("--constellations", default="psk:16,qam:16,qam:64,qam:256")
    e.add_argument("--modes", default="periodic,aperiodic")
    e.add_argument("--n", default="16:1024:x2")
    common(e, trials=0)
    e.set_defaults(func=cmd_eisl)

    d = sub.add_parser("doppler", help="CP-SC Doppler cut versus CP-OFDM range profile")
    d.add_argument("--constellation", default="qam:16")
    d.add_argument("--n", type=int, default=128)
    common(d)
    d.set_defaults(func=cmd_doppler)

    m = sub.add_parser("moments", help="kurtosis, class and optional 4th-moment matrix")
    m.add_argument("--constellations", default="psk:4,qam:16,qam:64,qam:256,sg64apsk")
    m.add_argument("--n", type=int, default=0, help="also emit the moment matrix of n symbols")
    m.add_argument("--seed", type=int, default=None)
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_moments)

    o = sub.add_parser("optimality", help="finite-difference stationarity check of OFDM")
    o.add_argument("--n", type=int, default=8)
    o.add_argument("--directions", type=int, default=100)
    o.add_argument("--step", type=float, default=1e-2)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--threads", type=int, default=1)
    o.add_argument("--out", default="-")
    o.set_defaults(func=cmd_optimality)

    r = sub.add_parser("ranging", help="two-target matched-filter RMSE versus SNR")
    r.add_argument("--scheme", default="ofdm")
    r.add_argument("--constellation", default="psk:4")
    r.add_argument("--n", type=int, default=128)
    r.add_argument("--bandwidth-hz", type=float, default=800e6)
    r.add_argument("--targets", default="11.25:1.0,18.75:0.1")
    r.add_argument("--snr-db", default="-10:30:2")
    r.add_argument("--cp", action=argparse.BooleanOptionalAction, default=True)
    r.add_argument("--min-separation", type=int, default=3)
    common(r)
    r.set_defaults(func=cmd_ranging)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        text = args.func(args, started)
        _write(args.out, text)
    except (SpecError, UsageError, SidelobeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
