"""RF switch technologies for sub-THz RIS panels.

Ranged table entries are stored as :class:`~rislink.interval.Interval`
values in SI units (Hz, s, W, J).  Entries the source comparison leaves
open are :class:`Unknown`, never zero, and anything computed from them
stays unknown.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

from .interval import Interval


@dataclass(frozen=True)
class Unknown:
    reason: str = "unknown"

    def __bool__(self):
        return False


Ranged = Union[Interval, Unknown]

FS, MW, NJ, GHZ = 1e-15, 1e-3, 1e-9, 1e9


@dataclass(frozen=True)
class SwitchTechnology:
    name: str
    max_demonstrated_freq: float  # Hz
    ron_coff: Ranged  # s
    dc_dissipation: Ranged  # W per switch
    switching_energy: Ranged  # J per toggle
    trl: Interval
    size_score: int  # 1-3, higher is smaller
    cmos_integration: int  # 1-3, higher is easier

    def __post_init__(self):
        if isinstance(self.ron_coff, Interval) and not self.ron_coff.hi > 0.0:
            raise ValueError(f"{self.name}: Ron*Coff must be positive")
        if not (1 <= self.trl.lo and self.trl.hi <= 9):
            raise ValueError(f"{self.name}: TRL must lie in 1..9, got {self.trl}")
        for score in (self.size_score, self.cmos_integration):
            if score not in (1, 2, 3):
                raise ValueError(f"{self.name}: ordinal scores are 1..3, got {score}")


_BLANK = "left blank in the source comparison (energy listed only for negligible DC dissipation)"


def builtin_catalog() -> list[SwitchTechnology]:
    """The six technologies of the sub-THz switch comparison, in table order."""
    return [
        SwitchTechnology("RF-SOI", 220 * GHZ, Interval.point(90 * FS), Interval(0.05 * MW, 0.1 * MW),
                         Unknown(_BLANK), Interval.point(9), 2, 3),
        SwitchTechnology("BiCMOS", 133 * GHZ, Interval.point(80 * FS), Interval(10 * MW, 50 * MW),
                         Unknown(_BLANK), Interval.point(8), 2, 3),
        SwitchTechnology("GaN-on-Si", 40 * GHZ, Interval.point(55 * FS), Interval(0.1 * MW, 1 * MW),
                         Unknown(_BLANK), Interval.point(6), 1, 2),
        SwitchTechnology("Microfluidics", 123 * GHZ, Unknown("TBD"), Interval.point(0.001 * MW),
                         Interval.point(20 * NJ), Interval(1, 3), 1, 1),
        SwitchTechnology("Memristors", 480 * GHZ, Interval.below(10 * FS), Interval.point(0.0),
                         Interval(1 * NJ, 10 * NJ), Interval.point(2), 3, 1),
        SwitchTechnology("PCM", 67 * GHZ, Interval.below(10 * FS), Interval.point(0.0),
                         Interval(1 * NJ, 500 * NJ), Interval.point(4), 3, 2),
    ]


def get(name: str, catalog=None) -> SwitchTechnology:
    for tech in catalog if catalog is not None else builtin_catalog():
        if tech.name.lower() == name.lower():
            return tech
    raise KeyError(f"no switch technology named {name!r}")


def _cutoff(x):
    return math.inf if x == 0.0 else 1.0 / (2.0 * math.pi * x)


def cutoff_frequency(ron_coff):
    """Cut-off frequency ``1 / (2 pi Ron Coff)`` in Hz.

    Accepts seconds as a float or an :class:`Interval`; an unknown figure
    of merit gives an :class:`Unknown` result.
    """
    if isinstance(ron_coff, Unknown):
        return ron_coff
    if isinstance(ron_coff, Interval):
        return ron_coff.map_decreasing(_cutoff)
    if not ron_coff > 0.0:
        raise ValueError(f"Ron*Coff must be positive, got {ron_coff}")
    return _cutoff(ron_coff)


def static_power(switch_count: int, tech: SwitchTechnology, on_fraction: float = 1.0) -> Ranged:
    """Total DC dissipation in watts with ``on_fraction`` of the switches biased."""
    if switch_count < 0:
        raise ValueError(f"switch count must be >= 0, got {switch_count}")
    if not 0.0 <= on_fraction <= 1.0:
        raise ValueError(f"on_fraction must be in [0, 1], got {on_fraction}")
    if isinstance(tech.dc_dissipation, Unknown):
        return tech.dc_dissipation
    return tech.dc_dissipation * (switch_count * on_fraction)


def reconfiguration_energy(switch_count: int, tech: SwitchTechnology) -> Ranged:
    """Worst-case energy in joules to reprogram the panel (every switch toggles)."""
    if switch_count < 0:
        raise ValueError(f"switch count must be >= 0, got {switch_count}")
    if isinstance(tech.switching_energy, Unknown):
        return tech.switching_energy
    return tech.switching_energy * switch_count


def filter_by_trl(catalog, min_trl: int, optimistic: bool = True):
    """Technologies whose TRL reaches ``min_trl``; compares the upper bound unless ``optimistic`` is off."""
    return [t for t in catalog if (t.trl.hi if optimistic else t.trl.lo) >= min_trl]


# --- JSON interchange -------------------------------------------------------

_RANGED_FIELDS = {
    "ron_coff": ("ron_coff_fs", FS),
    "dc_dissipation": ("dc_dissipation_mw", MW),
    "switching_energy": ("switching_energy_nj", NJ),
}


def _num(x):
    return float(f"{x:.9g}")


def _ranged_to_json(value, unit):
    if isinstance(value, Unknown):
        return None
    out = {"min": _num(value.lo / unit), "max": _num(value.hi / unit)}
    if value.lo_open:
        out["min_exclusive"] = True
    return out


def _ranged_from_json(obj, unit, reason):
    if obj is None:
        return Unknown(reason or "unknown")
    if isinstance(obj, (int, float)):
        return Interval.point(obj * unit)
    return Interval(obj["min"] * unit, obj["max"] * unit, bool(obj.get("min_exclusive", False)))


def tech_to_json(tech: SwitchTechnology) -> dict:
    d = {"name": tech.name, "max_demonstrated_freq_ghz": _num(tech.max_demonstrated_freq / GHZ)}
    reasons = {}
    for attr, (key, unit) in _RANGED_FIELDS.items():
        value = getattr(tech, attr)
        d[key] = _ranged_to_json(value, unit)
        if isinstance(value, Unknown):
            reasons[key] = value.reason
    d["trl"] = {"min": int(tech.trl.lo), "max": int(tech.trl.hi)}
    d["size_score"] = tech.size_score
    d["cmos_integration_score"] = tech.cmos_integration
    d["unknown_reasons"] = reasons
    return d


def tech_from_json(d: dict) -> SwitchTechnology:
    reasons = d.get("unknown_reasons", {})
    ranged = {attr: _ranged_from_json(d.get(key), unit, reasons.get(key))
              for attr, (key, unit) in _RANGED_FIELDS.items()}
    trl = d["trl"]
    trl = Interval.point(trl) if isinstance(trl, int) else Interval(trl["min"], trl["max"])
    return SwitchTechnology(
        name=d["name"],
        max_demonstrated_freq=d["max_demonstrated_freq_ghz"] * GHZ,
        trl=trl,
        size_score=d["size_score"],
        cmos_integration=d["cmos_integration_score"],
        **ranged,
    )


def catalog_to_json(catalog) -> list[dict]:
    return [tech_to_json(t) for t in catalog]


def merge_catalogs(base, user_records: list[dict]) -> list[SwitchTechnology]:
    """Overlay user JSON records onto ``base`` by name; user fields win, new names are appended."""
    merged = {t.name: tech_to_json(t) for t in base}
    for rec in user_records:
        if "name" not in rec:
            raise ValueError("every catalog record needs a 'name'")
        current = merged.get(rec["name"], {})
        reasons = dict(current.get("unknown_reasons", {}))
        for key in rec:
            reasons.pop(key, None)
        reasons.update(rec.get("unknown_reasons", {}))
        merged[rec["name"]] = {**current, **rec, "unknown_reasons": reasons}
    return [tech_from_json(d) for d in merged.values()]


def load_catalog(path) -> list[SwitchTechnology]:
    """Built-in catalog overlaid with the JSON array at ``path``."""
    with open(path) as fh:
        records = json.load(fh)
    if not isinstance(records, list):
        raise ValueError("a catalog file must hold a JSON array of technology records")
    return merge_catalogs(builtin_catalog(), records)
