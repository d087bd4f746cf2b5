"""Run configuration: INI parsing, validation, and canonical dict form."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError

_PARTITIONS = ("I", "II", "III", "IV", "mask")
_MODELS = ("h1", "h2")
_LATTICES = ("carpet", "generalized", "square")


@dataclass
class LatticeConfig:
    kind: str = "carpet"
    order: int = 3
    unit: int = 1
    m: int = 3
    m_f: int = 1
    side: int = 24
    periodic: bool = False


@dataclass
class ModelConfig:
    kind: str = "h1"
    t: float = 1.0
    mu: float = 0.0
    t1: float = 0.5
    filling: str = "half"          # "half", "pure", or an integer count


@dataclass
class PartitionConfig:
    kind: str = "IV"
    mask_path: str = ""


@dataclass
class EFConfig:
    enabled: bool = True
    offsets: str = "default"       # "default" or comma-separated floats
    exclude_hole_free: bool = True
    permutations: int = 100


@dataclass
class ProfileConfig:
    enabled: bool = True
    window: str = "auto"           # "auto" or "lo,hi"


@dataclass
class DosConfig:
    enabled: bool = False
    method: str = "exact"          # "exact" or "kpm"
    bins: int = 64
    moments: int = 512
    vectors: int = 20


@dataclass
class FitConfig:
    enabled: bool = False
    orders: tuple[int, ...] = (2, 3, 4)


@dataclass
class RunConfig:
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    ef: EFConfig = field(default_factory=EFConfig)
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    dos: DosConfig = field(default_factory=DosConfig)
    fits: FitConfig = field(default_factory=FitConfig)
    label: str = "run"

    def validate(self) -> None:
        lat = self.lattice
        if lat.kind not in _LATTICES:
            raise ValidationError(f"unknown lattice kind {lat.kind!r}")
        if lat.kind == "square":
            if lat.side < 2:
                raise ValidationError("square side must be >= 2")
        else:
            if lat.order < 1:
                raise ValidationError("lattice order must be >= 1")
            if lat.unit < 1:
                raise ValidationError("unit width must be >= 1")
            if not (0 <= lat.m_f < lat.m and (lat.m - lat.m_f) % 2 == 0):
                raise ValidationError(
                    f"invalid rule (m={lat.m}, m_f={lat.m_f}): need 0 <= m_f < m "
                    "and m - m_f even"
                )
        if self.model.kind not in _MODELS:
            raise ValidationError(f"unknown model kind {self.model.kind!r}")
        filling = self.model.filling
        if filling not in ("half", "pure"):
            try:
                count = int(filling)
            except ValueError as exc:
                raise ValidationError(
                    f"filling must be 'half', 'pure', or an integer, got {filling!r}"
                ) from exc
            if count < 0:
                raise ValidationError("integer filling must be >= 0")
        if self.partition.kind not in _PARTITIONS:
            raise ValidationError(f"unknown partition {self.partition.kind!r}")
        if self.partition.kind == "mask":
            if not self.partition.mask_path:
                raise ValidationError("mask partition requires mask_path")
            if not Path(self.partition.mask_path).is_file():
                raise ValidationError(
                    f"mask file not found: {self.partition.mask_path}"
                )
        if self.ef.offsets != "default":
            for tok in self.ef.offsets.split(","):
                try:
                    float(tok)
                except ValueError as exc:
                    raise ValidationError(
                        f"bad launch offset {tok!r} in ef.offsets"
                    ) from exc
        if self.ef.permutations < 10:
            raise ValidationError("ef.permutations must be >= 10")
        if self.profile.window != "auto":
            parts = self.profile.window.split(",")
            if len(parts) != 2:
                raise ValidationError("profile.window must be 'auto' or 'lo,hi'")
            try:
                lo, hi = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValidationError("profile.window bounds must be integers") from exc
            if not 1 <= lo <= hi:
                raise ValidationError("profile.window must satisfy 1 <= lo <= hi")
        if self.dos.method not in ("exact", "kpm"):
            raise ValidationError(f"unknown dos method {self.dos.method!r}")
        if self.dos.bins < 2:
            raise ValidationError("dos.bins must be >= 2")
        if self.dos.method == "kpm" and self.dos.moments < 32:
            raise ValidationError("dos.moments must be >= 32 for kpm")
        if self.fits.enabled:
            if len(self.fits.orders) < 3:
                raise ValidationError("fits.orders needs at least 3 orders")
            if any(o < 1 for o in self.fits.orders):
                raise ValidationError("fits.orders must be positive")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "lattice": vars(self.lattice).copy(),
            "model": vars(self.model).copy(),
            "partition": vars(self.partition).copy(),
            "ef": vars(self.ef).copy(),
            "profile": vars(self.profile).copy(),
            "dos": vars(self.dos).copy(),
            "fits": {"enabled": self.fits.enabled, "orders": list(self.fits.orders)},
        }


def _get(parser, section, key, cast, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    if cast is bool:
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValidationError(
            f"[{section}] {key}: expected {cast.__name__}, got {raw!r}"
        ) from exc


def load_config(path) -> RunConfig:
    """Parse an INI file into a validated RunConfig."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ValidationError(f"cannot parse config {path}: {exc}") from exc

    cfg = RunConfig()
    cfg.label = _get(parser, "run", "label", str, path.stem)

    cfg.lattice.kind = _get(parser, "lattice", "kind", str, cfg.lattice.kind)
    cfg.lattice.order = _get(parser, "lattice", "order", int, cfg.lattice.order)
    cfg.lattice.unit = _get(parser, "lattice", "unit", int, cfg.lattice.unit)
    cfg.lattice.m = _get(parser, "lattice", "m", int, cfg.lattice.m)
    cfg.lattice.m_f = _get(parser, "lattice", "mf", int, cfg.lattice.m_f)
    cfg.lattice.side = _get(parser, "lattice", "side", int, cfg.lattice.side)
    cfg.lattice.periodic = _get(
        parser, "lattice", "periodic", bool, cfg.lattice.periodic
    )

    cfg.model.kind = _get(parser, "model", "kind", str, cfg.model.kind)
    cfg.model.t = _get(parser, "model", "t", float, cfg.model.t)
    cfg.model.mu = _get(parser, "model", "mu", float, cfg.model.mu)
    cfg.model.t1 = _get(parser, "model", "t1", float, cfg.model.t1)
    cfg.model.filling = _get(parser, "model", "filling", str, cfg.model.filling)

    cfg.partition.kind = _get(parser, "partition", "kind", str, cfg.partition.kind)
    cfg.partition.mask_path = _get(
        parser, "partition", "mask_path", str, cfg.partition.mask_path
    )

    cfg.ef.enabled = _get(parser, "ef", "enabled", bool, cfg.ef.enabled)
    cfg.ef.offsets = _get(parser, "ef", "offsets", str, cfg.ef.offsets)
    cfg.ef.exclude_hole_free = _get(
        parser, "ef", "exclude_hole_free", bool, cfg.ef.exclude_hole_free
    )
    cfg.ef.permutations = _get(
        parser, "ef", "permutations", int, cfg.ef.permutations
    )

    cfg.profile.enabled = _get(parser, "profile", "enabled", bool, cfg.profile.enabled)
    cfg.profile.window = _get(parser, "profile", "window", str, cfg.profile.window)

    cfg.dos.enabled = _get(parser, "dos", "enabled", bool, cfg.dos.enabled)
    cfg.dos.method = _get(parser, "dos", "method", str, cfg.dos.method)
    cfg.dos.bins = _get(parser, "dos", "bins", int, cfg.dos.bins)
    cfg.dos.moments = _get(parser, "dos", "moments", int, cfg.dos.moments)
    cfg.dos.vectors = _get(parser, "dos", "vectors", int, cfg.dos.vectors)

    cfg.fits.enabled = _get(parser, "fits", "enabled", bool, cfg.fits.enabled)
    orders_raw = _get(parser, "fits", "orders", str, "")
    if orders_raw:
        try:
            cfg.fits.orders = tuple(int(tok) for tok in orders_raw.split(","))
        except ValueError as exc:
            raise ValidationError(
                f"[fits] orders: expected comma-separated integers, got {orders_raw!r}"
            ) from exc

    cfg.validate()
    return cfg
