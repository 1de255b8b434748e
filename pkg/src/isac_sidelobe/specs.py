"""Parsing of the compact constellation / basis / range strings used by the CLI.

Constellations::

    psk:16   qam:64   gaussian   sg64apsk
    apsk:r=4.54e-5,0.0067,0.0815,1.9983;n=16,16,16,16
    im:psk:4:p0=0.75

Bases (size from ``n``)::

    sc  ofdm  ofdm:L=4,M=32  cdma  otfs:M=16,L=8  afdm:c1=1/256,c2=0
    gofdm:perm=random,seed=3  haar:seed=1
"""

from __future__ import annotations

from fractions import Fraction

from . import bases as B
from . import constellations as C
from .errors import SidelobeError


class SpecError(SidelobeError):
    kind = "usage"


def _number(tok: str) -> float:
    try:
        return float(Fraction(tok.strip()))
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"not a number: {tok!r}") from None


def _int(tok: str) -> int:
    try:
        return int(tok.strip())
    except ValueError:
        raise SpecError(f"not an integer: {tok!r}") from None


def _kv(body: str, sep: str = ",") -> dict:
    out = {}
    for part in filter(None, body.split(sep)):
        if "=" not in part:
            raise SpecError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_constellation(spec: str):
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    head = head.lower()
    if head == "psk":
        return C.make_psk(_int(rest))
    if head == "qam":
        return C.make_qam(_int(rest))
    if head == "gaussian":
        return C.gaussian()
    if head in ("sg64apsk", "sg-64-apsk"):
        return C.make_sg64_apsk()
    if head == "apsk":
        kv = _kv(rest, ";")
        if set(kv) != {"r", "n"}:
            raise SpecError(f"apsk needs r=... and n=..., got {rest!r}")
        return C.make_apsk([_number(t) for t in kv["r"].split(",")], [_int(t) for t in kv["n"].split(",")])
    if head == "im":
        base, sep, p0 = rest.rpartition(":")
        if not sep or not p0.startswith("p0="):
            raise SpecError(f"index modulation spec must end in ':p0=<prob>', got {spec!r}")
        return C.apply_index_modulation(parse_constellation(base), _number(p0[3:]))
    raise SpecError(f"unknown constellation {head!r} in {spec!r}")


def parse_basis(spec: str, n: int) -> B.UnitaryBasis:
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    head = head.lower()
    kv = _kv(rest)
    if head == "sc":
        return B.basis_sc(n)
    if head == "ofdm":
        if not kv:
            return B.basis_ofdm(n)
        l, m = _int(kv.get("L", "1")), _int(kv.get("M", str(n)))
        if l * m != n:
            raise SpecError(f"ofdm L*M = {l * m} does not match n = {n}")
        return B.basis_ofdm_multi(l, m)
    if head == "cdma":
        return B.basis_cdma(n)
    if head == "otfs":
        if "M" not in kv or "L" not in kv:
            raise SpecError("otfs needs M=... and L=...")
        m, l = _int(kv["M"]), _int(kv["L"])
        if m * l != n:
            raise SpecError(f"otfs M*L = {m * l} does not match n = {n}")
        return B.basis_otfs(m, l)
    if head == "afdm":
        c1 = _number(kv["c1"]) if "c1" in kv else None
        return B.basis_afdm(n, c1, _number(kv.get("c2", "0")))
    if head == "gofdm":
        perm = kv.get("perm", "identity")
        seed = _int(kv["seed"]) if "seed" in kv else None
        if perm == "random":
            return B.random_generalized_ofdm(n, seed)
        if perm == "identity":
            return B.basis_generalized_ofdm(n)
        raise SpecError(f"gofdm perm must be 'random' or 'identity', got {perm!r}")
    if head == "haar":
        return B.basis_random(n, _int(kv.get("seed", "0")))
    raise SpecError(f"unknown scheme {head!r} in {spec!r}")


def parse_int_range(spec: str) -> list:
    """``"128"``, ``"16:1024:x2"`` (geometric) or ``"16:64:16"`` (arithmetic), inclusive."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [_int(parts[0])]
    if len(parts) != 3:
        raise SpecError(f"range must be start:stop:step, got {spec!r}")
    start, stop = _int(parts[0]), _int(parts[1])
    step = parts[2].strip()
    out = []
    if step.startswith("x"):
        factor = _int(step[1:])
        if factor < 2 or start < 1:
            raise SpecError(f"geometric factor must be >= 2 and start >= 1 in {spec!r}")
        v = start
        while v <= stop:
            out.append(v)
            v *= factor
    else:
        inc = _int(step)
        if inc <= 0:
            raise SpecError(f"step must be positive in {spec!r}")
        out = list(range(start, stop + 1, inc))
    return out


def parse_float_range(spec: str) -> list:
    """``"start:stop:step"`` inclusive, or a comma list of values."""
    if ":" not in spec:
        return [_number(t) for t in spec.split(",")]
    parts = spec.split(":")
    if len(parts) != 3:
        raise SpecError(f"range must be start:stop:step, got {spec!r}")
    start, stop, step = (_number(p) for p in parts)
    if step <= 0:
        raise SpecError(f"step must be positive in {spec!r}")
    count = int(round((stop - start) / step)) + 1
    return [start + i * step for i in range(max(count, 0))]


def parse_targets(spec: str) -> list:
    """``"11.25:1.0,18.75:0.1"`` -> ``[(11.25, 1.0), (18.75, 0.1)]``."""
    out = []
    for part in filter(None, spec.split(",")):
        r, sep, p = part.partition(":")
        out.append((_number(r), _number(p) if sep else 1.0))
    if not out:
        raise SpecError("no targets given")
    return out
