"""
JSON documents for instances and certificates.

Floats are written with 17 significant digits so that every binary64 value
survives a write/read cycle bit for bit, and keys always appear in the same
order, which makes equal certificates byte-identical.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Optional, Union

from core.dto import (
    CertificateFile,
    GameInstance,
    InstanceFile,
    MarginalVector,
    SaddleCertificate,
    SolveMethod,
    SparseMixedStrategy,
    StrategyAtom,
    TargetSubset,
)
from core.errors import InvalidStrategy, MalformedFile
from core.game import check_strategy, normalize

logger = logging.getLogger(__name__)

_INDENT = "  "


# ----------------------------------------------------------------------
# Emitter
# ----------------------------------------------------------------------


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    text = f"{x:.17g}"
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _is_scalar(obj: Any) -> bool:
    return obj is None or isinstance(obj, (bool, int, float, str))


def _emit(obj: Any, level: int = 0) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    pad, inner = _INDENT * level, _INDENT * (level + 1)
    if isinstance(obj, (list, tuple)):
        if all(_is_scalar(item) for item in obj):
            return "[" + ", ".join(_emit(item) for item in obj) + "]"
        items = [inner + _emit(item, level + 1) for item in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(key)}: {_emit(value, level + 1)}" for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit(obj: Any) -> str:
    """Deterministic JSON text with 17-digit floats and a trailing newline."""
    return _emit(obj) + "\n"


# ----------------------------------------------------------------------
# Instances
# ----------------------------------------------------------------------


def _load_json(text: str, label: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedFile(f"{label} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise MalformedFile(f"{label} must be a JSON object")
    return doc


def _require(doc: dict, key: str, kind: type, label: str) -> Any:
    if key not in doc:
        raise MalformedFile(f"{label} is missing '{key}'")
    value = doc[key]
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise MalformedFile(f"{label} field '{key}' must be {kind.__name__}, got {value!r}")
    return value


def _number_list(doc: dict, key: str, label: str, kind: type = float) -> tuple:
    values = _require(doc, key, list, label)
    for item in values:
        if isinstance(item, bool) or not isinstance(item, (int, float) if kind is float else int):
            raise MalformedFile(f"{label} field '{key}' holds non-{kind.__name__} {item!r}")
    return tuple(kind(item) for item in values)


def parse_instance(text: str) -> InstanceFile:
    """Parse an instance document.

    Raises:
        MalformedFile: not JSON, or fields missing / mistyped
    """
    doc = _load_json(text, "instance")
    return InstanceFile(
        costs=_number_list(doc, "costs", "instance"),
        k_a=_require(doc, "k_a", int, "instance"),
        k_d=_require(doc, "k_d", int, "instance"),
    )


def load_instance(path: Union[str, Path]) -> GameInstance:
    """Read and normalize an instance file."""
    inst = parse_instance(Path(path).read_text(encoding="utf-8"))
    return normalize(inst.costs, inst.k_a, inst.k_d)


def emit_instance(inst: InstanceFile) -> str:
    return emit({"costs": list(inst.costs), "k_a": inst.k_a, "k_d": inst.k_d})


# ----------------------------------------------------------------------
# Certificates
# ----------------------------------------------------------------------


def _atoms_out(strategy: SparseMixedStrategy, g: GameInstance) -> tuple[StrategyAtom, ...]:
    return tuple(
        StrategyAtom(targets=tuple(g.original_ids(subset)), prob=float(prob))
        for subset, prob in strategy.atoms
    )


def to_certificate_file(cert: SaddleCertificate, strategies: bool = False) -> CertificateFile:
    """Original-order document view of a certificate."""
    g = cert.game
    include = strategies and None not in (cert.attacker_strategy, cert.defender_strategy)
    return CertificateFile(
        value=float(cert.value),
        alpha=tuple(cert.alpha_original),
        beta=tuple(cert.beta_original),
        s_star=cert.s_star,
        r_star=cert.r_star,
        attacker_active=tuple(sorted(cert.attacker_active)),
        defender_active=tuple(sorted(cert.defender_active)),
        defender_pure=cert.defender_pure,
        method=cert.method.value,
        runtime_ns=int(cert.runtime_ns),
        attacker_strategy=_atoms_out(cert.attacker_strategy, g) if include else None,
        defender_strategy=_atoms_out(cert.defender_strategy, g) if include else None,
        discrepancy=cert.discrepancy,
    )


def emit_certificate(doc: CertificateFile) -> str:
    out: dict[str, Any] = {
        "value": doc.value,
        "alpha": list(doc.alpha),
        "beta": list(doc.beta),
        "s_star": doc.s_star,
        "r_star": doc.r_star,
        "attacker_active": list(doc.attacker_active),
        "defender_active": list(doc.defender_active),
        "defender_pure": doc.defender_pure,
    }
    if doc.has_strategies:
        for key, atoms in (
            ("attacker_strategy", doc.attacker_strategy),
            ("defender_strategy", doc.defender_strategy),
        ):
            out[key] = [{"targets": list(a.targets), "prob": a.prob} for a in atoms]
    out["method"] = doc.method
    out["runtime_ns"] = doc.runtime_ns
    if doc.discrepancy is not None:
        out["discrepancy"] = doc.discrepancy
    return emit(out)


def _parse_atoms(doc: dict, key: str) -> Optional[tuple[StrategyAtom, ...]]:
    if key not in doc:
        return None
    raw = _require(doc, key, list, "certificate")
    atoms = []
    for item in raw:
        if not isinstance(item, dict):
            raise MalformedFile(f"certificate '{key}' entries must be objects")
        atoms.append(
            StrategyAtom(
                targets=_number_list(item, "targets", f"'{key}' atom", kind=int),
                prob=float(_require(item, "prob", float, f"'{key}' atom")),
            )
        )
    return tuple(atoms)


def parse_certificate(text: str) -> CertificateFile:
    """Parse a certificate document.

    Raises:
        MalformedFile: not JSON, or fields missing / mistyped
    """
    doc = _load_json(text, "certificate")
    method = _require(doc, "method", str, "certificate")
    if method not in {m.value for m in SolveMethod}:
        raise MalformedFile(f"unknown certificate method {method!r}")
    discrepancy = doc.get("discrepancy")
    if discrepancy is not None:
        discrepancy = float(_require(doc, "discrepancy", float, "certificate"))
    return CertificateFile(
        value=float(_require(doc, "value", float, "certificate")),
        alpha=_number_list(doc, "alpha", "certificate"),
        beta=_number_list(doc, "beta", "certificate"),
        s_star=_require(doc, "s_star", int, "certificate"),
        r_star=_require(doc, "r_star", int, "certificate"),
        attacker_active=_number_list(doc, "attacker_active", "certificate", kind=int),
        defender_active=_number_list(doc, "defender_active", "certificate", kind=int),
        defender_pure=_require(doc, "defender_pure", bool, "certificate"),
        method=method,
        runtime_ns=_require(doc, "runtime_ns", int, "certificate"),
        attacker_strategy=_parse_atoms(doc, "attacker_strategy"),
        defender_strategy=_parse_atoms(doc, "defender_strategy"),
        discrepancy=discrepancy,
    )


def _atoms_in(atoms: tuple[StrategyAtom, ...], size: int, g: GameInstance) -> SparseMixedStrategy:
    for atom in atoms:
        if any(not 1 <= t <= g.m for t in atom.targets):
            raise MalformedFile(f"strategy atom {atom.targets} names a target outside 1..{g.m}")
    converted = tuple(
        (TargetSubset.of(g.sorted_index(t) for t in atom.targets), atom.prob) for atom in atoms
    )
    strategy = SparseMixedStrategy(atoms=converted, subset_size=size)
    try:
        check_strategy(strategy, size, g.m)
    except InvalidStrategy as e:
        raise MalformedFile(f"certificate strategy rejected: {e}") from e
    return strategy


def from_certificate_file(doc: CertificateFile, g: GameInstance) -> SaddleCertificate:
    """Rebuild a sorted-space certificate for the given instance.

    Raises:
        MalformedFile: marginal lengths do not match the instance, or a strategy is
            not a distribution over distinct k-subsets
    """
    if len(doc.alpha) != g.m or len(doc.beta) != g.m:
        raise MalformedFile(
            f"certificate has {len(doc.alpha)}/{len(doc.beta)} marginal entries, instance has {g.m}"
        )
    p = q = None
    if doc.has_strategies:
        p = _atoms_in(doc.attacker_strategy, g.k_a, g)
        q = _atoms_in(doc.defender_strategy, g.k_d, g)
    return SaddleCertificate(
        value=doc.value,
        alpha=MarginalVector.from_array(g.from_original_order(doc.alpha), g.k_a),
        beta=MarginalVector.from_array(g.from_original_order(doc.beta), g.unprotected),
        s_star=doc.s_star,
        r_star=doc.r_star,
        attacker_active=frozenset(doc.attacker_active),
        defender_active=frozenset(doc.defender_active),
        defender_pure=doc.defender_pure,
        method=SolveMethod(doc.method),
        game=g,
        attacker_strategy=p,
        defender_strategy=q,
        runtime_ns=doc.runtime_ns,
        discrepancy=doc.discrepancy,
    )
