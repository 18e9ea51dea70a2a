"""
Metric spec loading

A metric spec is JSON of the form

    {"dim": 2, "kind": "builtin", "name": "randers", "params": {...},
     "domain": {"type": "ball", "radius": 1.0}, "volume": "exp(x1)"}

or, with ``"kind": "expression"``, an ``"expression"`` text in x1..xn, y1..yn.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..errors import ParamError
from .builtins import BUILTIN_NAMES, builtin_metric
from .expression import format_expression, parse_expression
from .kernel import Domain, MetricKernel, VolumeDensity

logger = logging.getLogger(__name__)

SPEC_KEYS = {"dim", "kind", "name", "params", "expression", "domain", "volume"}
KINDS = ("builtin", "expression")


def parse_metric_expression(text: str, dim: int, domain: Optional[Domain] = None,
                            label: Optional[str] = None) -> MetricKernel:
    """
    Parse a metric kernel from expression text.

    Raises:
        ParseError: malformed text
        ArityError: variable out of range for ``dim`` or wrong argument count
    """
    node = parse_expression(text, dim)
    return MetricKernel(
        dim=dim,
        evaluator=node.evaluate,
        domain=domain or Domain.everywhere(),
        label=label or text.strip(),
        expression=format_expression(node),
    )


def parse_volume_expression(text: str, dim: int) -> VolumeDensity:
    """Parse a volume density sigma(x) from expression text in x1..xn only"""
    node = parse_expression(text, dim, allow_fibre=False)

    def evaluator(xs):
        return node.evaluate(xs, ())

    label = text.strip()
    if label != "1":
        label = format_expression(node)
    return VolumeDensity(dim, evaluator, label)


@dataclass
class MetricSpec:
    """Parsed and checked metric spec"""

    dim: int
    kind: str = "builtin"
    name: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    expression: Optional[str] = None
    domain: Optional[Domain] = None
    volume_expression: str = "1"

    @property
    def label(self) -> str:
        return self.name if self.kind == "builtin" else self.expression

    def kernel(self) -> MetricKernel:
        if self.kind == "builtin":
            return builtin_metric(self.name, self.dim, self.params, self.domain)
        return parse_metric_expression(self.expression, self.dim, self.domain)

    def volume(self) -> VolumeDensity:
        if self.volume_expression.strip() == "1":
            return VolumeDensity.unit(self.dim)
        return parse_volume_expression(self.volume_expression, self.dim)

    def to_dict(self) -> dict:
        data = {"dim": self.dim, "kind": self.kind}
        if self.kind == "builtin":
            data["name"] = self.name
            if self.params:
                data["params"] = self.params
        else:
            data["expression"] = self.expression
        if self.domain is not None:
            data["domain"] = self.domain.to_dict()
        data["volume"] = self.volume_expression
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MetricSpec":
        if not isinstance(data, dict):
            raise ParamError(f"metric spec must be a JSON object, got {type(data).__name__}")
        unknown = set(data) - SPEC_KEYS
        if unknown:
            raise ParamError(f"unknown metric spec keys: {', '.join(sorted(unknown))}")

        dim = data.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
            raise ParamError(f"metric spec needs an integer dim >= 2, got {dim!r}")
        kind = data.get("kind", "builtin")
        if kind not in KINDS:
            raise ParamError(f"metric spec kind must be one of {', '.join(KINDS)}, got {kind!r}")

        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise ParamError("metric spec params must be an object")
        volume = data.get("volume", "1")
        if not isinstance(volume, str):
            volume = str(volume) if isinstance(volume, (int, float)) and not isinstance(volume, bool) else None
        if volume is None:
            raise ParamError("metric spec volume must be an expression in x")
        domain = Domain.from_dict(data["domain"]) if data.get("domain") is not None else None

        if kind == "builtin":
            name = data.get("name")
            if name not in BUILTIN_NAMES:
                raise ParamError(f"builtin metric spec needs a name in {', '.join(BUILTIN_NAMES)}, got {name!r}")
            if data.get("expression") is not None:
                raise ParamError("builtin metric specs do not take an expression")
            return cls(dim, kind, name, params, None, domain, volume)

        expression = data.get("expression")
        if not isinstance(expression, str) or not expression.strip():
            raise ParamError("expression metric spec needs a non-empty expression")
        if params:
            raise ParamError("expression metric specs do not take params")
        return cls(dim, kind, data.get("name"), {}, expression, domain, volume)


def load_metric_spec(source: Union[str, dict, Path], dim: Optional[int] = None) -> MetricSpec:
    """
    Load a metric spec from a dict, inline JSON, a file path, or a bare builtin name.

    Args:
        source: the spec
        dim: dimension used for a bare builtin name (default 2)

    Raises:
        ParamError: unreadable file, malformed JSON, schema violation
    """
    if isinstance(source, dict):
        return MetricSpec.from_dict(source)

    text = str(source).strip()
    if text in BUILTIN_NAMES:
        return MetricSpec.from_dict({"dim": dim or 2, "kind": "builtin", "name": text})
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParamError(f"malformed metric spec JSON: {e}")
        return MetricSpec.from_dict(data)

    path = Path(text)
    if not path.exists():
        raise ParamError(f"metric spec {text!r} is neither a builtin name, inline JSON nor an existing file")
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ParamError(f"could not read metric spec {path}: {e}")
    logger.debug("loaded metric spec from %s", path)
    return MetricSpec.from_dict(data)
