"""Text and JSON formats for games, targets and rationals.

Inline weighted games use ``[q;w1,w2,...]`` with entries ``a/b`` or
integers. Game JSON files use ``{"n", "kind", ...}`` with ``kind`` either
``"weighted"`` (``quota``, ``weights``) or ``"explicit"`` (``min_winning``,
1-indexed players).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Union

from .game import GameError, SimpleGame, WeightedGame

__all__ = [
    "ParseError",
    "parse_fraction",
    "parse_vector",
    "parse_inline_game",
    "game_to_json",
    "game_from_json",
    "load_game",
    "load_target",
    "fraction_str",
]

_INLINE = re.compile(r"^\s*\[\s*([^;\]]+?)\s*;\s*([^\]]*?)\s*\]\s*$")


class ParseError(ValueError):
    pass


def parse_fraction(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def parse_vector(text: str) -> tuple:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise ParseError("empty vector")
    return tuple(parse_fraction(p) for p in parts)


def parse_inline_game(text: str) -> WeightedGame:
    m = _INLINE.match(text)
    if not m:
        raise ParseError(f"expected a game of the form [q;w1,w2,...], got {text!r}")
    quota = parse_fraction(m.group(1))
    weights = parse_vector(m.group(2))
    try:
        return WeightedGame(quota, weights)
    except GameError as exc:
        raise ParseError(str(exc)) from exc


def game_to_json(g: Union[SimpleGame, WeightedGame]) -> dict:
    if isinstance(g, WeightedGame):
        return {
            "n": g.n,
            "kind": "weighted",
            "quota": fraction_str(g.quota),
            "weights": [fraction_str(w) for w in g.weights],
        }
    return {
        "n": g.n,
        "kind": "explicit",
        "min_winning": [[p + 1 for p in range(g.n) if m >> p & 1] for m in g.min_winning_masks],
    }


def game_from_json(data: dict) -> Union[SimpleGame, WeightedGame]:
    try:
        kind = data["kind"]
        n = int(data["n"])
        if kind == "weighted":
            g = WeightedGame(parse_fraction(data["quota"]), tuple(parse_fraction(w) for w in data["weights"]))
            if g.n != n:
                raise ParseError(f"n={n} but {g.n} weights given")
            return g
        if kind == "explicit":
            coalitions = []
            for c in data["min_winning"]:
                if any(not 1 <= int(p) <= n for p in c):
                    raise ParseError(f"coalition {c} has players outside 1..{n}")
                coalitions.append([int(p) - 1 for p in c])
            return SimpleGame.from_min_winning(n, coalitions)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed game JSON: {exc}") from exc
    except GameError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown game kind {kind!r}; expected 'weighted' or 'explicit'")


def load_game(spec: str) -> Union[SimpleGame, WeightedGame]:
    """Inline ``[q;w...]`` text, or a path to a game JSON file."""
    if spec.lstrip().startswith("["):
        return parse_inline_game(spec)
    path = Path(spec)
    if not path.exists():
        raise ParseError(f"no such game file and not an inline game: {spec!r}")
    try:
        return game_from_json(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{spec}: invalid JSON ({exc})") from exc


def load_target(spec: str) -> tuple:
    """Inline ``a/b,c/d,...`` or a JSON file holding a list (or {"sigma": [...]})."""
    path = Path(spec)
    if path.suffix == ".json" or (path.exists() and path.is_file()):
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read target file {spec!r}: {exc}") from exc
        if isinstance(data, dict):
            data = data.get("sigma", data.get("values"))
        if not isinstance(data, list):
            raise ParseError("target JSON must be a list of rationals")
        return tuple(parse_fraction(x) for x in data)
    return parse_vector(spec)
