"""Constructible families: Seifert-free classes with prescribed invariants."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import isprime

from .errors import BadParameter, DomainError, UnknownExample
from .links import catalog
from .manifold import (
    DescriptorOptions,
    ManifoldDescriptor,
    SurgeryPresentation,
    connected_sum_all,
    descriptor_from_seifert,
    descriptor_from_surgery,
    s1xs2_descriptor,
    sphere_descriptor,
)
from .obstruct import DEFAULT_CUTOFF, DistinctionReport, ObstructionReport, distinguish, obstruct
from .observability import span
from .seifert import SeifertInvariants, betti_one, format_seifert, has_two_torsion, parse_seifert


def torsion_summand(q: Optional[SeifertInvariants]) -> ManifoldDescriptor:
    """Descriptor of the rational homology sphere carrying the torsion linking form (S^3 when None)."""
    if q is None:
        return sphere_descriptor()
    if not q.base_orientable or betti_one(q):
        raise DomainError(f"{format_seifert(q)} must be an orientable-base rational homology sphere")
    if has_two_torsion(q):
        raise DomainError(f"{format_seifert(q)} has 2-torsion; the torsion must have odd order")
    return descriptor_from_seifert(q)


def zero_surgery(name: str, milnor_cap: int, **parameters) -> ManifoldDescriptor:
    link = catalog(name, parameters)
    return descriptor_from_surgery(SurgeryPresentation.from_link(link), DescriptorOptions(milnor_cap=milnor_cap))


def _with_handles(core: ManifoldDescriptor, q: Optional[SeifertInvariants], copies: int, milnor_cap: int):
    handles = [s1xs2_descriptor(milnor_cap)] * copies
    return connected_sum_all([core, torsion_summand(q), *handles])


def prop41_member(d: int, m: int, q: Optional[SeifertInvariants] = None, milnor_cap: int = 6) -> ManifoldDescriptor:
    """N_d # Q # (2m-2)(S^1 x S^2): beta1 = 2m+1, vanishing rational cup products, Massey degree d.

    N_d is zero surgery on L_(d+1), whose first nonvanishing mu-bar has length d + 1.
    """
    if m < 1:
        raise BadParameter(f"m must be at least 1, got {m}")
    if d < 3:
        raise BadParameter(f"d must be at least 3, got {d}")
    if d + 1 > milnor_cap:
        raise BadParameter(f"Massey degree {d} needs a Milnor length cap of at least {d + 1}, got {milnor_cap}")
    return _with_handles(zero_surgery("L_d", milnor_cap, d=d + 1), q, 2 * m - 2, milnor_cap)


def prop42_member(r: int, milnor_cap: int = 6) -> ManifoldDescriptor:
    """Zero surgery on the Borromean rings plus 2r-3 unknots."""
    if r < 2:
        raise BadParameter(f"r must be at least 2, got {r}")
    return zero_surgery("borromean_unlink", milnor_cap, n=2 * r - 3)


def prop43_member(k: int, m: int, q: Optional[SeifertInvariants] = None, milnor_cap: int = 6) -> ManifoldDescriptor:
    """N_k # Q # (2m-3)(S^1 x S^2) with N_k zero surgery on the (k,1) cabled Borromean rings."""
    if m < 2:
        raise BadParameter(f"m must be at least 2, got {m}")
    if k < 1:
        raise BadParameter(f"k must be at least 1, got {k}")
    return _with_handles(zero_surgery("cabled_borromean", milnor_cap, k=k), q, 2 * m - 3, milnor_cap)


def prop44_member(p: int) -> ManifoldDescriptor:
    """p surgery on each component of the Borromean rings."""
    if p == 2 or not isprime(p):
        raise BadParameter(f"p must be an odd prime, got {p}")
    link = catalog("borromean_framed", {"p": p})
    return descriptor_from_surgery(SurgeryPresentation.from_link(link), DescriptorOptions(milnor_cap=None))


def whitehead_member(milnor_cap: int = 6) -> ManifoldDescriptor:
    return zero_surgery("whitehead", milnor_cap)


@dataclass
class ExampleRow:
    label: str
    descriptor: ManifoldDescriptor
    report: ObstructionReport


@dataclass
class ExampleResult:
    name: str
    claim: str
    rows: List[ExampleRow] = field(default_factory=list)
    distinctions: List[Tuple[str, str, DistinctionReport]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def _ints(parameters: Mapping[str, object], key: str, default: Sequence[int]) -> List[int]:
    raw = parameters.get(key)
    if raw is None:
        return list(default)
    if isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        items = [piece for piece in str(raw).split(",") if piece.strip()]
    try:
        return [int(item) for item in items]
    except ValueError:
        raise BadParameter(f"{key} must be a comma separated list of integers, got {raw!r}") from None


def _one_int(parameters: Mapping[str, object], key: str, default: int) -> int:
    values = _ints(parameters, key, [default])
    if len(values) != 1:
        raise BadParameter(f"{key} takes a single integer")
    return values[0]


def _torsion(parameters: Mapping[str, object]) -> Optional[SeifertInvariants]:
    raw = parameters.get("torsion")
    if raw is None or isinstance(raw, SeifertInvariants):
        return raw
    if str(raw).strip().lower() in ("", "trivial"):
        return None
    return parse_seifert(str(raw))


def _prop41(parameters, cap) -> ExampleResult:
    m = _one_int(parameters, "m", 1)
    q = _torsion(parameters)
    result = ExampleResult("prop4.1", "beta1 = 2m+1, zero rational cup products, pairwise distinct by Milnor degree")
    for d in _ints(parameters, "d", [3, 4, 5]):
        member = prop41_member(d, m, q, cap)
        result.rows.append(ExampleRow(f"M_{d}", member, obstruct(member)))
    return result


def _prop42(parameters, cap) -> ExampleResult:
    result = ExampleResult("prop4.2", "even beta1 = 2r with a nonzero triple cup product")
    for r in _ints(parameters, "r", [2, 3]):
        member = prop42_member(r, cap)
        result.rows.append(ExampleRow(f"r={r}", member, obstruct(member)))
    return result


def _prop43(parameters, cap) -> ExampleResult:
    m = _one_int(parameters, "m", 2)
    q = _torsion(parameters)
    result = ExampleResult("prop4.3", "beta1 = 2m with integral cup forms of content |k|, pairwise distinct")
    for k in _ints(parameters, "k", [1, 2, 3]):
        member = prop43_member(k, m, q, cap)
        result.rows.append(ExampleRow(f"M_{k}", member, obstruct(member)))
    return result


def _prop44(parameters, cap) -> ExampleResult:
    result = ExampleResult("prop4.4", "rational homology spheres with a nonzero mod p triple cup product")
    for p in _ints(parameters, "p", [3, 5, 7]):
        member = prop44_member(p)
        result.rows.append(ExampleRow(f"p={p}", member, obstruct(member)))
    return result


def _whitehead(parameters, cap) -> ExampleResult:
    member = whitehead_member(max(cap, 4))
    result = ExampleResult("whitehead-example", "Massey degree 3, yet no obstruction fires")
    result.rows.append(ExampleRow("whitehead", member, obstruct(member)))
    result.notes.append(
        "zero surgery on the Whitehead link admits a Seifert fibering although it has a nonvanishing "
        "Massey product of length 3; the odd-beta1 criterion cannot be naively extended to even beta1"
    )
    return result


EXAMPLES: Dict[str, Callable[[Mapping[str, object], int], ExampleResult]] = {
    "prop4.1": _prop41,
    "prop4.2": _prop42,
    "prop4.3": _prop43,
    "prop4.4": _prop44,
    "whitehead-example": _whitehead,
}


def run_example(
    name: str,
    parameters: Optional[Mapping[str, object]] = None,
    milnor_cap: int = 6,
    cutoff: int = DEFAULT_CUTOFF,
) -> ExampleResult:
    builder = EXAMPLES.get(name)
    if builder is None:
        raise UnknownExample(f"unknown example {name!r}", known=sorted(EXAMPLES))
    with span("run_example", example=name):
        result = builder(dict(parameters or {}), milnor_cap)
        for first, second in itertools.combinations(result.rows, 2):
            report = distinguish(first.descriptor, second.descriptor, cutoff)
            result.distinctions.append((first.label, second.label, report))
    return result


def build_member(name: str, parameters: Optional[Mapping[str, object]] = None, milnor_cap: int = 6) -> ManifoldDescriptor:
    """A single family member, for running the obstruction checks on one manifold."""
    parameters = dict(parameters or {})
    if name == "prop4.1":
        return prop41_member(
            _one_int(parameters, "d", 3), _one_int(parameters, "m", 1), _torsion(parameters), milnor_cap
        )
    if name == "prop4.2":
        return prop42_member(_one_int(parameters, "r", 2), milnor_cap)
    if name == "prop4.3":
        return prop43_member(
            _one_int(parameters, "k", 1), _one_int(parameters, "m", 2), _torsion(parameters), milnor_cap
        )
    if name == "prop4.4":
        return prop44_member(_one_int(parameters, "p", 3))
    if name == "whitehead-example":
        return whitehead_member(max(milnor_cap, 4))
    raise UnknownExample(f"unknown example {name!r}", known=sorted(EXAMPLES))
