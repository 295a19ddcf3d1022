"""JSON frames for the registered result and configuration dataclasses.

A registered object is written as ``{"type": <class name>, "data": {...}}``.
Enums are stored by value, numpy scalars and arrays as plain numbers and
lists, and tuples as lists; :func:`from_dict` casts them back through dacite.
Non-finite floats (e.g. an unset gradient norm) are written as NaN/Infinity.
"""
import dacite
from dataclasses import is_dataclass, asdict
from enum import Enum
from typing import Any, Dict, Union
import typing
import json
import numpy as np

REGISTRY : Dict[str,type] = {}

DACITE_CAST = [Enum,tuple,typing.Tuple,float]


def register(klass):
    """Class decorator that makes a dataclass available to deserialize()."""
    name = klass.__name__
    if name in REGISTRY and REGISTRY[name] is not klass:
        raise ValueError("A data class named {} is already registered".format(name))
    REGISTRY[name] = klass
    return klass


def is_registered(obj) -> bool:
    return REGISTRY.get(obj.__class__.__name__) is obj.__class__


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def to_dict(obj) -> dict:
    """Plain dict of a dataclass, enums as values."""
    if not is_dataclass(obj):
        raise ValueError("{} is not a dataclass".format(obj.__class__.__name__))
    return asdict(obj, dict_factory=lambda items: {k:_plain(v) for k,v in items})


def from_dict(klass, data : dict, strict : bool = False):
    """Builds a dataclass from a dict.  With strict=True unknown keys raise
    dacite.UnexpectedDataError."""
    return dacite.from_dict(klass, data, config=dacite.Config(cast=DACITE_CAST, strict=strict))


def _frame(obj) -> dict:
    if not is_registered(obj):
        raise ValueError("{} is not a registered class".format(obj.__class__.__name__))
    return {'type':obj.__class__.__name__,'data':to_dict(obj)}


def _unframe(frame) -> Any:
    if not isinstance(frame,dict):
        raise IOError("Expected a JSON object, got {}".format(type(frame).__name__))
    for key in ('type','data'):
        if key not in frame:
            raise IOError("Frame has no '{}' key".format(key))
    klass = REGISTRY.get(frame['type'])
    if klass is None:
        raise IOError("Class of type {} not found in registry".format(frame['type']))
    return from_dict(klass,frame['data'])


def _is_frame(obj) -> bool:
    return isinstance(obj,dict) and set(obj.keys()) == {'type','data'} and obj['type'] in REGISTRY


def serialize(obj) -> str:
    return json.dumps(_frame(obj), sort_keys=True)


def deserialize(data : Union[str,bytes,dict]):
    if isinstance(data,(str,bytes)):
        data = json.loads(data)
    return _unframe(data)


def _encode_tree(obj):
    if isinstance(obj,dict):
        return {k:_encode_tree(v) for k,v in obj.items()}
    if isinstance(obj,list):
        return [_encode_tree(v) for v in obj]
    if is_registered(obj):
        return _frame(obj)
    return _plain(obj)


def _decode_tree(obj):
    if _is_frame(obj):
        return _unframe(obj)
    if isinstance(obj,dict):
        return {k:_decode_tree(v) for k,v in obj.items()}
    if isinstance(obj,list):
        return [_decode_tree(v) for v in obj]
    return obj


def serialize_collection(objs) -> str:
    """Serializes a nested dict/list holding registered objects and plain
    values."""
    return json.dumps(_encode_tree(objs), sort_keys=True)


def deserialize_collection(data : Union[str,bytes]):
    """Inverse of serialize_collection; frames naming a registered type are
    rebuilt, other dicts are left as they are."""
    return _decode_tree(json.loads(data))


def load(file):
    """Reads one registered object from an open JSON file."""
    return deserialize(file.read())


def save(obj, file):
    file.write(serialize(obj))
