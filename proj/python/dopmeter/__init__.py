"""Singlet-projection DOP meter model (Python bindings)."""

import os
from pathlib import Path

from ._core import *  # noqa: F401,F403
from ._core import DomainError, load_material

_PACKAGE_DATA = Path(__file__).with_name("data")


def data_dir() -> Path:
    env = os.environ.get("DOPMETER_DATA_DIR")
    if env:
        return Path(env)
    if _PACKAGE_DATA.is_dir():
        return _PACKAGE_DATA
    # build tree / editable install
    return Path(__file__).resolve().parents[2] / "data" / "materials"


def ktp():
    return load_material(data_dir() / "ktp.json")
