"""Reads the JSON documents of the runner: the settings file and experiment config
files. (if a file is not provided, the default settings file is used.)"""

from __future__ import annotations

import json
import os
from typing import Optional, Union

from FileSystem import SETTINGS_FILE


JsonType = Union[dict, list, tuple, str, int, float, bool, None]


class NotFoundException(Exception):
    def __init__(self, name: str):
        super().__init__(f"'{name}' not found")


class InvalidDocument(Exception):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path} is not a JSON object: {reason}")


def _resolve(save_file: Optional[str]) -> str:
    return SETTINGS_FILE if save_file is None else os.path.abspath(save_file)


def read_document(path: Optional[str] = None) -> dict:
    """Loads a whole JSON document. A missing settings file reads as empty."""
    file_path = _resolve(path)
    if path is None and not os.path.exists(file_path):
        return {}
    if not os.path.exists(file_path):
        raise NotFoundException(file_path)
    with open(file_path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidDocument(file_path, str(e)) from e
    if not isinstance(data, dict):
        raise InvalidDocument(file_path, f"top level is {type(data).__name__}")
    return data


def get_setting(name: str, save_file: Optional[str] = None) -> JsonType:
    file_path = _resolve(save_file)
    if not os.path.exists(file_path):
        raise NotFoundException(name)

    json_data = read_document(file_path)
    if name in json_data:
        return json_data[name]
    raise NotFoundException(name)
