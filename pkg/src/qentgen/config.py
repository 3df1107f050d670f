"""JSON model configs, schema version 1.

A config names exactly one model variant::

    {"schema_version": 1,
     "model": {"wiener": {"mu": [[[1, 0], [0, 0], [0, 0]], ...],
                          "c": [[1, 0], [0, 0], [0, 0]]}}}

Complex numbers are ``[re, im]`` pairs; a bare real number is accepted on
input and always written back as a pair. Errors carry the JSON line and
column for syntax problems and a dotted field path for schema problems.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baths import PROFILES, DeltaFamily, EqualTimeMatrix, Mode, OUNoise, ThermalBath, WienerFieldModel
from .coeffs import BlockCoeffMatrix
from .qlin import ValidationError

SCHEMA_VERSION = 1
BUNDLED_DIR = Path(__file__).with_name("configs")


class ConfigError(ValidationError):
    """Malformed config; the message names the line or field at fault."""


@dataclass(frozen=True)
class ModelConfig:
    variant: str
    model: object
    schema_version: int = SCHEMA_VERSION


# -- complex encoding ----------------------------------------------------------

def _complex(x, path):
    if isinstance(x, bool):
        raise ConfigError(f"{path}: expected a number or [re, im] pair, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if (
        isinstance(x, list)
        and len(x) == 2
        and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)
    ):
        return complex(float(x[0]), float(x[1]))
    raise ConfigError(f"{path}: expected a number or [re, im] pair, got {x!r}")


def _cvec(x, n, path):
    if not isinstance(x, list) or len(x) != n:
        got = len(x) if isinstance(x, list) else type(x).__name__
        raise ConfigError(f"{path}: expected a list of {n} complex entries, got {got}")
    return np.array([_complex(v, f"{path}[{i}]") for i, v in enumerate(x)])


def _cmat(x, n, path):
    if not isinstance(x, list) or len(x) != n:
        got = f"{len(x)} rows" if isinstance(x, list) else type(x).__name__
        raise ConfigError(f"{path}: expected a {n}x{n} matrix, got {got}")
    return np.array([_cvec(row, n, f"{path}[{i}]") for i, row in enumerate(x)])


def _real(x, path, positive=False):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{path}: expected a real number, got {x!r}")
    if positive and not x > 0:
        raise ConfigError(f"{path}: must be > 0, got {x!r}")
    return float(x)


def _pair(z):
    return [float(z.real), float(z.imag)]


def _enc_vec(v):
    return [_pair(complex(z)) for z in np.asarray(v).ravel()]


def _enc_mat(m):
    return [_enc_vec(row) for row in np.asarray(m)]


def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{path}: missing field(s) {', '.join(missing)}")
    extra = sorted(set(obj) - set(required) - set(optional))
    if extra:
        raise ConfigError(f"{path}: unknown field(s) {', '.join(extra)}")


# -- variants ------------------------------------------------------------------

_BLOCKS = ("k11", "k22", "k12", "h11", "h22", "h12")


def _load_markovian(obj, path):
    _check_keys(obj, path, (), _BLOCKS)
    blocks = {k: _cmat(obj[k], 3, f"{path}.{k}") for k in _BLOCKS if k in obj}
    return BlockCoeffMatrix(**blocks)


def _dump_markovian(k):
    return {name: _enc_mat(getattr(k, name)) for name in _BLOCKS}


def _load_thermal(obj, path):
    _check_keys(obj, path, ("modes", "beta"))
    beta = _real(obj["beta"], f"{path}.beta", positive=True)
    if not isinstance(obj["modes"], list) or not obj["modes"]:
        raise ConfigError(f"{path}.modes: expected a non-empty list of modes")
    modes = []
    for i, m in enumerate(obj["modes"]):
        p = f"{path}.modes[{i}]"
        _check_keys(m, p, ("omega", "c1", "c2"))
        modes.append(
            Mode(
                _real(m["omega"], f"{p}.omega", positive=True),
                _cvec(m["c1"], 3, f"{p}.c1"),
                _cvec(m["c2"], 3, f"{p}.c2"),
            )
        )
    return ThermalBath(tuple(modes), beta)


def _dump_thermal(b):
    return {
        "modes": [
            {"omega": m.omega, "c1": _enc_vec(m.c1), "c2": _enc_vec(m.c2)} for m in b.modes
        ],
        "beta": b.beta,
    }


def _load_ou(obj, path):
    _check_keys(obj, path, ("epsilon",), ("omega_z", "strength"))
    return OUNoise(
        _real(obj["epsilon"], f"{path}.epsilon", positive=True),
        _real(obj.get("omega_z", 0.0), f"{path}.omega_z"),
        _real(obj.get("strength", 1.0), f"{path}.strength"),
    )


def _dump_ou(n):
    return {"epsilon": n.epsilon, "omega_z": n.omega_z, "strength": n.strength}


def _load_wiener(obj, path):
    _check_keys(obj, path, ("mu", "c"))
    return WienerFieldModel(_cmat(obj["mu"], 3, f"{path}.mu"), _cvec(obj["c"], 3, f"{path}.c"))


def _dump_wiener(w):
    return {"mu": _enc_mat(w.mu), "c": _enc_vec(w.c)}


_WEIGHTS = ("a_weight", "b_weight", "c_weight")


def _load_delta(obj, path):
    _check_keys(obj, path, ("profile", "epsilon"), _WEIGHTS)
    prof = obj["profile"]
    if prof not in PROFILES:
        raise ConfigError(f"{path}.profile: unknown profile {prof!r}; choose from {sorted(PROFILES)}")
    weights = {k: _cmat(obj[k], 6, f"{path}.{k}") for k in _WEIGHTS if k in obj}
    return DeltaFamily(prof, _real(obj["epsilon"], f"{path}.epsilon", positive=True), **weights)


def _dump_delta(f):
    out = {"profile": f.profile, "epsilon": f.epsilon}
    out.update({k: _enc_mat(getattr(f, k)) for k in _WEIGHTS})
    return out


def _load_custom(obj, path):
    _check_keys(obj, path, ("matrix",))
    return EqualTimeMatrix(_cmat(obj["matrix"], 6, f"{path}.matrix"))


def _dump_custom(m):
    return {"matrix": _enc_mat(m.matrix)}


VARIANTS = {
    "markovian": (BlockCoeffMatrix, _load_markovian, _dump_markovian),
    "thermal": (ThermalBath, _load_thermal, _dump_thermal),
    "ou_dephasing": (OUNoise, _load_ou, _dump_ou),
    "wiener": (WienerFieldModel, _load_wiener, _dump_wiener),
    "delta_family": (DeltaFamily, _load_delta, _dump_delta),
    "custom_equal_time": (EqualTimeMatrix, _load_custom, _dump_custom),
}


# -- public API ----------------------------------------------------------------

def parse_config(text, source="<config>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    _check_keys(doc, source, ("schema_version", "model"))
    ver = doc["schema_version"]
    if ver != SCHEMA_VERSION or isinstance(ver, bool):
        raise ConfigError(f"{source}.schema_version: expected {SCHEMA_VERSION}, got {ver!r}")
    model = doc["model"]
    if not isinstance(model, dict) or len(model) != 1:
        n = len(model) if isinstance(model, dict) else type(model).__name__
        raise ConfigError(f"{source}.model: expected exactly one model variant, got {n}")
    (variant, body), = model.items()
    if variant not in VARIANTS:
        raise ConfigError(f"{source}.model: unknown variant {variant!r}; choose from {sorted(VARIANTS)}")
    path = f"{source}.model.{variant}"
    try:
        obj = VARIANTS[variant][1](body, path)
    except ConfigError:
        raise
    except ValidationError as e:
        raise ConfigError(f"{path}: {e}") from None
    return ModelConfig(variant, obj)


def resolve_path(name):
    """Return ``name`` if it exists, else the bundled config of that name."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (BUNDLED_DIR / p.name, BUNDLED_DIR / f"{p.name}.json"):
        if cand.exists():
            return cand
    raise ConfigError(f"{name}: no such file (and no bundled config of that name)")


def load_config(name):
    p = resolve_path(name)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"{p}: cannot read: {e.strerror}") from None
    return parse_config(text, str(p))


def config_dict(cfg):
    for variant, (cls, _, dump) in VARIANTS.items():
        if variant == cfg.variant:
            if not isinstance(cfg.model, cls):
                raise ConfigError(f"variant {variant!r} does not match {type(cfg.model).__name__}")
            return {"schema_version": SCHEMA_VERSION, "model": {variant: dump(cfg.model)}}
    raise ConfigError(f"unknown variant {cfg.variant!r}")


def dump_config(cfg, indent=2):
    return json.dumps(config_dict(cfg), indent=indent) + "\n"


def config_for(model):
    """Wrap a library model object in a :class:`ModelConfig`."""
    for variant, (cls, _, _) in VARIANTS.items():
        if isinstance(model, cls):
            return ModelConfig(variant, model)
    raise ConfigError(f"no config variant for {type(model).__name__}")


def same_model(a, b):
    """Exact equality of two configs via their canonical serialization."""
    return config_dict(a) == config_dict(b)


def bundled_configs():
    return sorted(BUNDLED_DIR.glob("*.json"))
