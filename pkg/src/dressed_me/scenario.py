"""
JSON scenario documents and the named presets shipped with the package.

Complex numbers are stored as {"re": x, "im": y}.  A scenario describes a
QuadraticSystem, its baths, the master-equation flavour and optional sweep,
elimination and oracle settings.
"""

from __future__ import annotations

import copy
import inspect
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import analytic
from .bath import BathSpec, FlatDensity, OhmicDensity
from .errors import ScenarioError
from .lindblad import LindbladModel, build
from .nambu import QuadraticSystem, diagonalize

PRESETS = ("beamsplitter", "pairing", "detuned_pair", "three_mode",
           "three_mode_exact", "textbook_pair")

_TOP_KEYS = {"name", "description", "modes", "couplings", "baths", "frame", "master_equation",
             "basis", "sweep", "eliminate", "oracle", "family"}


def encode_complex(z) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def decode_complex(obj, where: str = "value") -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        try:
            return complex(float(obj["re"]), float(obj["im"]))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{where}: non-numeric complex parts") from exc
    raise ScenarioError(f"{where}: expected a number or {{'re', 'im'}} object, got {obj!r}")


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"{where}: expected a real number, got {obj!r}")
    return float(obj)


@dataclass(frozen=True)
class Sweep:
    paths: tuple
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def to_dict(self) -> dict:
        path: Any = self.paths[0] if len(self.paths) == 1 else list(self.paths)
        return {"path": path, "from": self.start, "to": self.stop, "points": self.points}

    @classmethod
    def from_dict(cls, d: dict) -> "Sweep":
        if not isinstance(d, dict) or not {"path", "from", "to", "points"} <= set(d):
            raise ScenarioError("sweep needs path, from, to and points")
        paths = d["path"]
        paths = (paths,) if isinstance(paths, str) else tuple(paths)
        if not paths or not all(isinstance(p, str) for p in paths):
            raise ScenarioError("sweep path must be a dotted string or a list of them")
        points = d["points"]
        if isinstance(points, bool) or not isinstance(points, int) or points < 3:
            raise ScenarioError("sweep points must be an integer >= 3")
        return cls(paths, _number(d["from"], "sweep.from"), _number(d["to"], "sweep.to"), points)


@dataclass(frozen=True)
class Scenario:
    modes: tuple
    couplings: tuple = ()
    baths: tuple = ()
    frame: Any = None
    master_equation: str = "global"
    basis: str = "dressed"
    sweep: Optional[Sweep] = None
    eliminate: tuple = ()
    oracle: dict = field(default_factory=dict)
    family: Optional[dict] = None
    name: str = ""
    description: str = ""

    # -- serialization -----------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise ScenarioError(f"unknown scenario keys {sorted(unknown)}")
        if "modes" not in d or not isinstance(d["modes"], list) or not d["modes"]:
            raise ScenarioError("scenario needs a non-empty 'modes' list")
        modes = []
        for k, m in enumerate(d["modes"]):
            if not isinstance(m, dict) or "omega" not in m:
                raise ScenarioError(f"modes[{k}] needs 'omega'")
            modes.append({"name": str(m.get("name", f"a{k + 1}")),
                          "omega": _number(m["omega"], f"modes[{k}].omega"),
                          "chi": decode_complex(m.get("chi", 0.0), f"modes[{k}].chi")})
        n = len(modes)
        couplings = []
        for k, c in enumerate(d.get("couplings", [])):
            try:
                i, j = int(c["i"]), int(c["j"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ScenarioError(f"couplings[{k}] needs integer i and j") from exc
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ScenarioError(f"couplings[{k}] indices ({i}, {j}) invalid")
            couplings.append({"i": i, "j": j,
                              "lambda": decode_complex(c.get("lambda", 0.0), f"couplings[{k}].lambda"),
                              "g": decode_complex(c.get("g", 0.0), f"couplings[{k}].g")})
        baths = []
        for k, b in enumerate(d.get("baths", [])):
            baths.append(_bath_from_dict(b, k, n))
        frame = d.get("frame")
        if frame is not None and frame != "dressed":
            if not isinstance(frame, list) or len(frame) != n:
                raise ScenarioError("frame must be null, 'dressed' or one frequency per mode")
            frame = tuple(_number(f, "frame") for f in frame)
        me = d.get("master_equation", "global")
        if me not in ("local", "global", "global_degenerate"):
            raise ScenarioError(f"unknown master_equation {me!r}")
        basis = d.get("basis", "dressed" if me != "local" else "bare")
        if basis not in ("bare", "dressed"):
            raise ScenarioError(f"unknown basis {basis!r}")
        sweep = Sweep.from_dict(d["sweep"]) if d.get("sweep") is not None else None
        elim = d.get("eliminate", [])
        if not isinstance(elim, list) or not all(isinstance(x, int) and 0 <= x < n for x in elim):
            raise ScenarioError("eliminate must list mode indices")
        oracle = d.get("oracle", {})
        if not isinstance(oracle, dict) or set(oracle) - {"cutoff", "horizon", "dt", "amplitude"}:
            raise ScenarioError("oracle accepts cutoff, horizon, dt and amplitude")
        fam = d.get("family")
        if fam is not None:
            if not isinstance(fam, dict) or "name" not in fam or fam["name"] not in analytic.FAMILIES:
                raise ScenarioError(f"family must name one of {sorted(analytic.FAMILIES)}")
            fam = copy.deepcopy(fam)
        sc = cls(tuple(modes), tuple(couplings), tuple(baths), frame, me, basis, sweep,
                 tuple(elim), copy.deepcopy(oracle), fam, str(d.get("name", "")),
                 str(d.get("description", "")))
        if sweep is not None:
            for p in sweep.paths:
                sc.get(p)
        return sc

    def to_dict(self) -> dict:
        out: dict = {}
        if self.name:
            out["name"] = self.name
        if self.description:
            out["description"] = self.description
        out["modes"] = [{"name": m["name"], "omega": m["omega"], "chi": encode_complex(m["chi"])}
                        for m in self.modes]
        out["couplings"] = [{"i": c["i"], "j": c["j"], "lambda": encode_complex(c["lambda"]),
                             "g": encode_complex(c["g"])} for c in self.couplings]
        out["baths"] = [_bath_to_dict(b) for b in self.baths]
        out["frame"] = list(self.frame) if isinstance(self.frame, tuple) else self.frame
        out["master_equation"] = self.master_equation
        out["basis"] = self.basis
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        if self.eliminate:
            out["eliminate"] = list(self.eliminate)
        if self.oracle:
            out["oracle"] = copy.deepcopy(self.oracle)
        if self.family is not None:
            out["family"] = copy.deepcopy(self.family)
        return out

    @classmethod
    def loads(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from exc
        return cls.loads(text)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # -- parameter access --------------------------------------------------

    def get(self, path: str):
        node: Any = self.to_dict()
        for part in path.split("."):
            try:
                node = node[int(part)] if isinstance(node, list) else node[part]
            except (KeyError, IndexError, ValueError, TypeError) as exc:
                raise ScenarioError(f"path {path!r} does not resolve") from exc
        if isinstance(node, dict) and set(node) == {"re", "im"}:
            return complex(node["re"], node["im"])
        if isinstance(node, bool) or not isinstance(node, (int, float)):
            raise ScenarioError(f"path {path!r} is not a numeric scalar")
        return node

    def with_value(self, paths, value: float) -> "Scenario":
        paths = (paths,) if isinstance(paths, str) else tuple(paths)
        d = self.to_dict()
        for path in paths:
            parts = path.split(".")
            node: Any = d
            for part in parts[:-1]:
                node = node[int(part)] if isinstance(node, list) else node[part]
            last = int(parts[-1]) if isinstance(node, list) else parts[-1]
            if isinstance(node[last], dict):
                node[last] = encode_complex(value)
            else:
                node[last] = float(value)
        return Scenario.from_dict(d)

    # -- model construction ------------------------------------------------

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def system(self) -> QuadraticSystem:
        return QuadraticSystem.from_couplings(
            [m["omega"] for m in self.modes],
            [(c["i"], c["j"], c["lambda"], c["g"]) for c in self.couplings],
            chi=[m["chi"] for m in self.modes])

    def bath_specs(self) -> list[BathSpec]:
        return list(self.baths)

    def frame_frequencies(self, basis: Optional[str] = None):
        basis = basis or self.basis
        if self.frame == "dressed":
            if basis != "dressed":
                raise ScenarioError("a 'dressed' frame needs the dressed basis")
            return np.array(diagonalize(self.system()).dressed_freq)
        return None if self.frame is None else np.array(self.frame)

    def model(self, master_equation: Optional[str] = None) -> LindbladModel:
        return build(master_equation or self.master_equation, self.system(), self.bath_specs())

    def analytic_family(self, name: Optional[str] = None):
        if self.family is None and name is None:
            raise ScenarioError("scenario has no analytic family")
        spec = self.family or {}
        fname = name or spec["name"]
        if fname not in analytic.FAMILIES:
            raise ScenarioError(f"unknown family {fname!r}")
        factory = analytic.FAMILIES[fname]
        accepted = inspect.signature(factory).parameters
        params = {k: v for k, v in spec.get("params", {}).items() if k in accepted}
        missing = [k for k in accepted if k not in params]
        if missing:
            raise ScenarioError(f"family {fname!r} is missing parameters {missing}")
        return factory(**params)


def _bath_from_dict(b, k: int, n: int) -> BathSpec:
    if not isinstance(b, dict):
        raise ScenarioError(f"baths[{k}] must be an object")
    try:
        mode = int(b["mode"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"baths[{k}] needs an integer mode") from exc
    if not 0 <= mode < n:
        raise ScenarioError(f"baths[{k}].mode out of range")
    sd = b.get("spectral_density", {"kind": "flat", "value": 0.0})
    try:
        if sd.get("kind") == "flat":
            density = FlatDensity(_number(sd["value"], f"baths[{k}].spectral_density.value"))
        elif sd.get("kind") == "ohmic":
            density = OhmicDensity(_number(sd["alpha"], "alpha"), _number(sd["cutoff"], "cutoff"))
        else:
            raise ScenarioError(f"baths[{k}]: unknown spectral density {sd!r}")
        return BathSpec(mode, b.get("statistics", "bose"),
                        _number(b.get("temperature", 0.0), f"baths[{k}].temperature"),
                        _number(b.get("chemical_potential", 0.0), f"baths[{k}].chemical_potential"),
                        density, b.get("attach", "bare"))
    except (KeyError, AttributeError, ValueError) as exc:
        raise ScenarioError(f"baths[{k}]: {exc}") from exc


def _bath_to_dict(b: BathSpec) -> dict:
    sd = b.spectral_density
    if isinstance(sd, FlatDensity):
        sdd = {"kind": "flat", "value": sd.value}
    else:
        sdd = {"kind": "ohmic", "alpha": sd.alpha, "cutoff": sd.cutoff}
    return {"mode": b.mode, "statistics": b.statistics, "temperature": b.temperature,
            "chemical_potential": b.chemical_potential, "spectral_density": sdd, "attach": b.attach}


def preset_path(name: str):
    if name not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return resources.files("dressed_me") / "presets" / f"{name}.json"


def load_preset(name: str) -> Scenario:
    return Scenario.loads(preset_path(name).read_text())


def resolve(spec: str) -> Scenario:
    """Load a scenario from a file path or a preset name."""
    if spec in PRESETS and not Path(spec).exists():
        return load_preset(spec)
    return Scenario.load(spec)
