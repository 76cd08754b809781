"""Compose map images and segmentation masks from a tileset.

Every tile carries an RGB raster and three binary masks (road surface, red
stop lines, yellow lane separators). Rotated variants are produced by exact
quarter turns of all four rasters together, so masks stay binary and aligned
with the image.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .grid import check_grid, to_dict
from .metrics import full_report
from .tiles import DIRECTIONS, N_CODES, rotate_cw

LAYERS = ("road", "red", "yellow")
LABEL_BACKGROUND, LABEL_ROAD, LABEL_RED, LABEL_YELLOW = 0, 1, 2, 3
# one representative per rotation class; rotations supply the other ten codes
CANONICAL_CODES = (0, 8, 10, 12, 14, 15)


class TilesetError(ValueError):
    pass


@dataclass
class TileAsset:
    code: int
    rgb: np.ndarray  # (px, px, 3) uint8
    road: np.ndarray  # (px, px) bool
    red: np.ndarray
    yellow: np.ndarray

    def __post_init__(self):
        px = self.rgb.shape[0]
        if self.rgb.shape != (px, px, 3):
            raise TilesetError(f"tile {self.code}: rgb must be square RGB, got {self.rgb.shape}")
        for name in LAYERS:
            m = getattr(self, name)
            if m.shape != (px, px):
                raise TilesetError(f"tile {self.code}: {name} mask shape {m.shape} != ({px}, {px})")
            if m.dtype != np.bool_:
                raise TilesetError(f"tile {self.code}: {name} mask must be boolean")

    @property
    def px(self) -> int:
        return self.rgb.shape[0]

    def rotated_cw(self) -> "TileAsset":
        def rot(a):
            return np.ascontiguousarray(np.rot90(a, k=-1, axes=(0, 1)))
        return TileAsset(rotate_cw(self.code), rot(self.rgb), rot(self.road),
                         rot(self.red), rot(self.yellow))


@dataclass
class TileSet:
    tile_px: int
    assets: dict[int, list[TileAsset]] = field(default_factory=dict)

    def covers(self, code: int) -> bool:
        return bool(self.assets.get(int(code)))

    def missing(self, codes=range(N_CODES)) -> list[int]:
        return sorted(int(c) for c in set(codes) if not self.covers(c))

    def get(self, code: int, rng=None) -> TileAsset:
        variants = self.assets[int(code)]
        if rng is None or len(variants) == 1:
            return variants[0]
        return variants[int(rng.integers(len(variants)))]


def close_under_rotation(base: dict[int, list[TileAsset]], tile_px: int) -> TileSet:
    """Fill in rotated codes; explicitly supplied codes are never overwritten."""
    assets = {c: list(v) for c, v in base.items()}
    for code in sorted(base):
        variants = base[code]
        for _ in range(3):
            variants = [a.rotated_cw() for a in variants]
            rc = variants[0].code
            if rc not in assets:
                assets[rc] = variants
    return TileSet(tile_px, assets)


# --- synthetic tiles -------------------------------------------------------

def _arm_layers(px: int) -> dict[str, np.ndarray]:
    """Masks for the north-facing half of a tile, in a fixed drawing frame."""
    mid = px // 2
    hw = int(round(px * 0.34))
    lo, hi = mid - hw, mid + hw
    sw = max(1, px // 32)  # side stripe width
    yw = max(1, px // 64)  # half width of the centre line
    dash = max(2, px // 16)
    bar = max(2, px // 16)

    def blank():
        return np.zeros((px, px), dtype=np.bool_)

    arm = blank()
    arm[:hi, lo:hi] = True
    centre = blank()
    centre[lo:hi, lo:hi] = True
    stripes = blank()
    stripes[:lo, lo:lo + sw] = True
    stripes[:lo, hi - sw:hi] = True
    closed_side = blank()  # stripe across the junction when no arm leaves north
    closed_side[lo:lo + sw, lo:hi] = True
    dashes = blank()
    rows = np.arange(mid)
    dashes[rows[(rows // dash) % 2 == 0], mid - yw:mid + yw] = True
    short_dashes = dashes.copy()
    short_dashes[lo - bar - 1:, :] = False
    stop = blank()
    stop[lo - bar:lo, lo + sw:mid - yw] = True
    return {"arm": arm, "centre": centre, "stripes": stripes, "closed": closed_side,
            "dashes": dashes, "short_dashes": short_dashes, "stop": stop}


def draw_tile(code: int, px: int, palette: dict) -> TileAsset:
    """Paint one tile directly from its connections."""
    parts = _arm_layers(px)

    def turned(mask, k):
        return np.rot90(mask, k=-k)

    zeros = np.zeros((px, px), dtype=np.bool_)
    road, white, red, yellow = zeros.copy(), zeros.copy(), zeros.copy(), zeros.copy()
    connected = [bool(code & d.bit) for d in DIRECTIONS]
    degree = sum(connected)
    if degree:
        road |= parts["centre"]
        for k, on in enumerate(connected):
            if on:
                road |= turned(parts["arm"], k)
                white |= turned(parts["stripes"], k)
                if degree >= 3:
                    yellow |= turned(parts["short_dashes"], k)
                    red |= turned(parts["stop"], k)
                else:
                    yellow |= turned(parts["dashes"], k)
            else:
                white |= turned(parts["closed"], k)
    rgb = np.empty((px, px, 3), dtype=np.uint8)
    rgb[:] = palette["background"]
    rgb[road] = palette["road"]
    rgb[white & road] = palette["white"]
    rgb[yellow] = palette["yellow"]
    rgb[red] = palette["red"]
    return TileAsset(code, rgb, road.copy(), red, yellow)


def _palette(rng) -> dict:
    def jitter(base, amount=12):
        if rng is None:
            return np.array(base, dtype=np.uint8)
        off = rng.integers(-amount, amount + 1, size=3)
        return np.clip(np.array(base) + off, 0, 255).astype(np.uint8)
    return {"background": jitter((96, 120, 88)), "road": jitter((38, 38, 42)),
            "white": jitter((235, 235, 235), 8), "yellow": jitter((240, 200, 20)),
            "red": jitter((200, 30, 30))}


def synth_tileset(tile_px: int = 128, rng=None) -> TileSet:
    """Procedural stand-in for a photographed tileset.

    Only the canonical codes are drawn; the rest are rotations. ``rng``
    jitters the flat colours, which keeps every asset rotation-consistent.
    """
    if tile_px < 32:
        raise ValueError("tile_px must be >= 32")
    if tile_px % 2:
        raise ValueError("tile_px must be even so quarter turns stay pixel-exact")
    palette = _palette(rng)
    base = {c: [draw_tile(c, tile_px, palette)] for c in CANONICAL_CODES}
    return close_under_rotation(base, tile_px)


# --- tileset directories ---------------------------------------------------

_DIR_RE = re.compile(r"^(\d+)(?:_(\w+))?$")


def _read_mask(path: Path, label: str) -> np.ndarray:
    arr = np.asarray(Image.open(path).convert("L"))
    values = set(np.unique(arr).tolist())
    if not values <= {0, 255} and not values <= {0, 1}:
        raise TilesetError(f"{label}: mask {path.name} is not binary (values {sorted(values)[:6]})")
    return arr > 0


def load_tileset(directory, *, require_all: bool = True) -> TileSet:
    """Read ``<code>[_<variant>]/{rgb,road,red,yellow}.png`` and add rotations."""
    root = Path(directory)
    if not root.is_dir():
        raise TilesetError(f"tileset directory {root} does not exist")
    base: dict[int, list[TileAsset]] = {}
    tile_px = None
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        m = _DIR_RE.match(sub.name)
        if not m:
            continue
        code = int(m.group(1))
        if code >= N_CODES:
            raise TilesetError(f"{sub.name}: tile code {code} out of range")
        files = {name: sub / f"{name}.png" for name in ("rgb",) + LAYERS}
        for name, path in files.items():
            if not path.is_file():
                raise TilesetError(f"{sub.name}: missing file {path.name}")
        rgb = np.asarray(Image.open(files["rgb"]).convert("RGB"))
        if rgb.shape[0] != rgb.shape[1]:
            raise TilesetError(f"{sub.name}: rgb.png is not square ({rgb.shape[1]}x{rgb.shape[0]})")
        if tile_px is None:
            tile_px = rgb.shape[0]
        elif rgb.shape[0] != tile_px:
            raise TilesetError(f"{sub.name}: size {rgb.shape[0]} differs from {tile_px}")
        masks = {}
        for name in LAYERS:
            masks[name] = _read_mask(files[name], sub.name)
            if masks[name].shape != rgb.shape[:2]:
                raise TilesetError(f"{sub.name}: {name}.png size does not match rgb.png")
        base.setdefault(code, []).append(TileAsset(code, rgb.copy(), **masks))
    if not base:
        raise TilesetError(f"no tile directories found in {root}")
    ts = close_under_rotation(base, tile_px)
    missing = ts.missing()
    if require_all and missing:
        raise TilesetError(f"tileset does not cover codes {missing}")
    return ts


def save_tileset(ts: TileSet, directory, codes=None) -> None:
    root = Path(directory)
    for code in sorted(codes if codes is not None else ts.assets):
        for i, asset in enumerate(ts.assets[code]):
            sub = root / (str(code) if i == 0 else f"{code}_{i}")
            sub.mkdir(parents=True, exist_ok=True)
            Image.fromarray(asset.rgb).save(sub / "rgb.png")
            for name in LAYERS:
                Image.fromarray(getattr(asset, name).astype(np.uint8) * 255).save(sub / f"{name}.png")


# --- rendering -------------------------------------------------------------

@dataclass
class RenderedMap:
    rgb: np.ndarray
    road_mask: np.ndarray
    red_mask: np.ndarray
    yellow_mask: np.ndarray
    metadata: dict

    @property
    def labels(self) -> np.ndarray:
        """Single-channel classes; red beats yellow beats road where they overlap."""
        out = np.zeros(self.road_mask.shape, dtype=np.uint8)
        out[self.road_mask] = LABEL_ROAD
        out[self.yellow_mask] = LABEL_YELLOW
        out[self.red_mask] = LABEL_RED
        return out

    def save(self, directory) -> dict[str, str]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "map_rgb.png": self.rgb,
            "mask_road.png": self.road_mask.astype(np.uint8) * 255,
            "mask_red.png": self.red_mask.astype(np.uint8) * 255,
            "mask_yellow.png": self.yellow_mask.astype(np.uint8) * 255,
            "labels.png": self.labels,
        }
        written = {}
        for name, arr in paths.items():
            Image.fromarray(arr).save(out / name)
            written[name] = os.fspath(out / name)
        with open(out / "map.json", "w") as fh:
            json.dump(self.metadata, fh, indent=2)
        written["map.json"] = os.fspath(out / "map.json")
        return written


def render(cells, ts: TileSet, rng=None) -> RenderedMap:
    g = check_grid(cells)
    H, W = g.shape
    px = ts.tile_px
    for (r, c), code in np.ndenumerate(g):
        if not ts.covers(code):
            raise TilesetError(f"tileset has no asset for code {int(code)} at cell ({r}, {c})")
    rgb = np.zeros((H * px, W * px, 3), dtype=np.uint8)
    layers = {name: np.zeros((H * px, W * px), dtype=np.bool_) for name in LAYERS}
    for (r, c), code in np.ndenumerate(g):
        a = ts.get(code, rng)
        sl = (slice(r * px, (r + 1) * px), slice(c * px, (c + 1) * px))
        rgb[sl] = a.rgb
        for name in LAYERS:
            layers[name][sl] = getattr(a, name)
    meta = {"grid": to_dict(g), "metrics": full_report(g).to_dict(), "tile_px": px}
    return RenderedMap(rgb, layers["road"], layers["red"], layers["yellow"], meta)
