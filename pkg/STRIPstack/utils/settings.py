"""Process-wide numeric settings: the solver tolerances, grid defaults and
output options in knowledge/defaults/current.yaml, plus `--set` overrides.

Keys are addressed by dotted paths, e.g. ``settings.get('minimize.tol_grad')``.
"""
import json
from ..knowledge import defaults
import copy
from typing import List,Union,Any

_SETTINGS = None

Path = Union[str,List[str]]


def _split(path : Path) -> List[str]:
    return path.split('.') if isinstance(path,str) else list(path)


def settings() -> dict:
    """The settings dictionary, copied from the defaults on first use."""
    global _SETTINGS
    if _SETTINGS is None:
        _SETTINGS = copy.deepcopy(defaults.SETTINGS)
    return _SETTINGS


def reset() -> None:
    """Drops all overrides."""
    global _SETTINGS
    _SETTINGS = None


def get(path : Path, defaultValue=KeyError) -> Any:
    """Value at a dotted path.  Without a default, a missing key raises
    KeyError naming the path."""
    keys = _split(path)
    val = settings()
    for key in keys:
        if not isinstance(val,dict) or key not in val:
            if defaultValue is KeyError:
                raise KeyError('.'.join(keys))
            return defaultValue
        val = val[key]
    return val


def set(path : Path, value : Any, leaf_only : bool = True) -> None:
    """Sets the value at a dotted path, creating missing sections.  With
    leaf_only, a whole section cannot be replaced."""
    keys = _split(path)
    if not keys:
        raise KeyError("Cannot set top-level settings")
    section = settings()
    for key in keys[:-1]:
        section = section.setdefault(key,{})
    if leaf_only and isinstance(section.get(keys[-1]),dict):
        raise ValueError("{} is a section, not a setting".format('.'.join(keys)))
    section[keys[-1]] = value


def apply_overrides(items : List[str]) -> None:
    """Applies KEY=VALUE overrides.  VALUE is read as JSON (numbers, booleans,
    quoted strings), falling back to the raw text."""
    for item in items:
        key,sep,text = item.partition('=')
        if not sep:
            raise ValueError("Override {} is not of the form KEY=VALUE".format(item))
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        set(key,value,leaf_only=not isinstance(value,dict))
