"""Reading and writing run configurations and settings files.

Both JSON and YAML are accepted.  A run file may pull in another file with
``!include other.yaml`` (YAML tag) or the string ``"!include other.json"``
(JSON), resolved relative to the including file.  In YAML,
``!relative_path field.json`` expands to a path next to the file.
Malformed text raises ConfigParseError with a 1-based line and column.
"""
import json
import yaml
import os
import io
from typing import Any, Optional
from .errors import ConfigParseError

INCLUDE_PREFIX = '!include '


def config_format(fn : str) -> str:
    ext = os.path.splitext(fn)[1].lower()
    if ext in ('.yaml','.yml'):
        return 'yaml'
    if ext == '.json':
        return 'json'
    raise IOError("Config file {} is not a .yaml, .yml, or .json file".format(fn))


def save_config(fn : str, data : dict) -> None:
    """Writes YAML or JSON, by extension, with sorted keys."""
    fmt = config_format(fn)
    with open(fn,'w') as f:
        if fmt == 'yaml':
            yaml.dump(data, f, yaml.SafeDumper, sort_keys=True)
        else:
            json.dump(data, f, indent=2, sort_keys=True)


def load_config_recursive(fn : str) -> Any:
    with open(fn,'r') as f:
        text = f.read()
    return parse_config_text(text, config_format(fn), os.path.dirname(fn))


def parse_config_text(text : str, fmt : str = 'json', root : Optional[str] = None) -> Any:
    """Parses configuration text; includes resolve against `root` (default
    the working directory)."""
    if root is None:
        root = os.path.curdir
    if fmt == 'json':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigParseError(e.msg, line=e.lineno, column=e.colno)
        return _resolve_json_includes(data,root)
    if fmt == 'yaml':
        try:
            return yaml.load(io.StringIO(text), _include_loader(root))
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark
            if mark is None:
                raise ConfigParseError(str(e))
            raise ConfigParseError(e.problem or str(e), line=mark.line+1, column=mark.column+1)
        except yaml.YAMLError as e:
            raise ConfigParseError(str(e))
    raise ValueError("Unknown config format {}".format(fmt))


def _load_included(root : str, name : str) -> Any:
    return load_config_recursive(os.path.normpath(os.path.join(root,name)))


def _include_loader(root : str) -> type:
    """A SafeLoader subclass resolving !include and !relative_path against root."""
    class _Loader(yaml.SafeLoader):
        pass
    def _construct_include(loader, node):
        return _load_included(root, loader.construct_scalar(node))
    def _construct_relative_path(loader, node):
        return os.path.normpath(os.path.join(root, loader.construct_scalar(node)))
    _Loader.add_constructor('!include', _construct_include)
    _Loader.add_constructor('!relative_path', _construct_relative_path)
    return _Loader


def _resolve_json_includes(obj, root : str):
    if isinstance(obj,dict):
        return {k:_resolve_json_includes(v,root) for k,v in obj.items()}
    if isinstance(obj,list):
        return [_resolve_json_includes(v,root) for v in obj]
    if isinstance(obj,str) and obj.startswith(INCLUDE_PREFIX):
        return _load_included(root, obj[len(INCLUDE_PREFIX):].strip())
    return obj
