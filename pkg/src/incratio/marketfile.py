"""Market spec files: a small human-writable YAML schema.

Schema (format 1):

    format: 1
    market_kind: linear | leontief | cobb_douglas
    commodities: <m>
    agents:
      - endowment: [<m floats>]
        alpha: [<m floats>]
      - ...
    deviation:            # optional
      agent: <index>
      alpha: [<m floats>]

Endowment columns (per-commodity totals) must sum to 1 within 1e-9;
otherwise the loader renormalizes each column and records a warning.
Floats are written with 17 significant digits so a dump/load round trip
is bit-exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from .errors import IncratioError
from .markets import Economy, UtilityFunction, UtilityKind

FORMAT_VERSION = 1
_COLUMN_TOL = 1e-9

_KIND_BY_NAME = {k.value: k for k in UtilityKind}


class MarketFileError(IncratioError):
    """The file is structurally malformed (missing/ill-typed fields)."""


@dataclass(frozen=True)
class LoadedMarket:
    economy: Economy
    deviation_agent: int | None
    deviation_alpha: np.ndarray | None
    warnings: tuple[str, ...]

    @property
    def kind(self) -> UtilityKind:
        return self.economy.kind


def _require(mapping, key, types, context):
    if not isinstance(mapping, dict) or key not in mapping:
        raise MarketFileError(f"{context}: missing required field '{key}'")
    value = mapping[key]
    if not isinstance(value, types):
        raise MarketFileError(f"{context}: field '{key}' has the wrong type")
    return value


def _float_list(value, m, context):
    if not isinstance(value, (list, tuple)) or len(value) != m:
        raise MarketFileError(f"{context}: expected a list of {m} numbers")
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise MarketFileError(f"{context}: non-numeric entry") from exc


def parse_market(document, source: str = "<market>") -> LoadedMarket:
    """Build a LoadedMarket from a parsed YAML document."""
    if not isinstance(document, dict):
        raise MarketFileError(f"{source}: top level must be a mapping")
    version = _require(document, "format", int, source)
    if version != FORMAT_VERSION:
        raise MarketFileError(f"{source}: unsupported format {version}")
    kind_name = _require(document, "market_kind", str, source)
    if kind_name not in _KIND_BY_NAME:
        raise MarketFileError(
            f"{source}: market_kind must be one of {sorted(_KIND_BY_NAME)}"
        )
    kind = _KIND_BY_NAME[kind_name]
    m = _require(document, "commodities", int, source)
    if m < 1:
        raise MarketFileError(f"{source}: commodities must be >= 1")
    agents = _require(document, "agents", list, source)
    if not agents:
        raise MarketFileError(f"{source}: at least one agent required")

    endowments = []
    alphas = []
    for idx, agent in enumerate(agents):
        ctx = f"{source}: agents[{idx}]"
        endowments.append(_float_list(_require(agent, "endowment", list, ctx), m, ctx))
        alphas.append(_float_list(_require(agent, "alpha", list, ctx), m, ctx))

    endow = np.array(endowments)
    warnings = []
    sums = endow.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > _COLUMN_TOL):
        bad = [j for j in range(m) if abs(sums[j] - 1.0) > _COLUMN_TOL]
        endow = endow / sums[None, :]
        warnings.append(
            "endowment columns "
            + ", ".join(f"{j} (sum {sums[j]:.6g})" for j in bad)
            + " renormalized to unit supply"
        )

    utilities = tuple(UtilityFunction(kind, a) for a in alphas)
    economy = Economy(endowments=endow, utilities=utilities)

    deviation_agent = None
    deviation_alpha = None
    if "deviation" in document and document["deviation"] is not None:
        dev = document["deviation"]
        ctx = f"{source}: deviation"
        deviation_agent = _require(dev, "agent", int, ctx)
        if not 0 <= deviation_agent < economy.n:
            raise MarketFileError(f"{ctx}: agent index out of range")
        deviation_alpha = np.array(
            _float_list(_require(dev, "alpha", list, ctx), m, ctx)
        )

    return LoadedMarket(
        economy=economy,
        deviation_agent=deviation_agent,
        deviation_alpha=deviation_alpha,
        warnings=tuple(warnings),
    )


def load_market(path) -> LoadedMarket:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            document = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise MarketFileError(f"{path}: invalid YAML ({exc})") from exc
    return parse_market(document, source=str(path))


def market_to_mapping(
    economy: Economy,
    deviation_agent: int | None = None,
    deviation_alpha=None,
) -> dict:
    """Serializable mapping in the spec-file schema (floats at 17 digits)."""
    doc = {
        "format": FORMAT_VERSION,
        "market_kind": economy.kind.value,
        "commodities": economy.m,
        "agents": [
            {
                "endowment": [float(f"{v:.17g}") for v in economy.endowments[i]],
                "alpha": [float(f"{v:.17g}") for v in economy.utilities[i].alpha],
            }
            for i in range(economy.n)
        ],
    }
    if deviation_agent is not None and deviation_alpha is not None:
        doc["deviation"] = {
            "agent": int(deviation_agent),
            "alpha": [float(f"{v:.17g}") for v in np.asarray(deviation_alpha)],
        }
    return doc


def dump_market(path, economy: Economy, deviation_agent=None, deviation_alpha=None):
    doc = market_to_mapping(economy, deviation_agent, deviation_alpha)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)
