from __future__ import annotations
import os


SETTINGS_FILE_NAME = "settings.json"
RESULTS_FOLDER_NAME = "results"

PROGRAM_DIR = os.path.dirname(os.path.abspath(__file__))

SETTINGS_FILE = os.path.join(PROGRAM_DIR, SETTINGS_FILE_NAME)
RESULTS_FOLDER = os.path.join(os.getcwd(), RESULTS_FOLDER_NAME)


def result_path(file_name: str) -> str:
    """Returns the default location of an output file."""
    return os.path.join(RESULTS_FOLDER, file_name)


def ensure_parent(path: str) -> str:
    """Creates the parent directory of `path` if needed and returns the absolute path."""
    path = os.path.abspath(path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    return path
