import json
import os
import time

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"
DEFAULT_OUTPUT_DIR = "towlab_results"
OUTPUT_DIR_ENV = "TOWLAB_OUTPUT_DIR"

### FILE HANDLING CONVENIENCE FUNCTIONS ###

def default_output_dir():
    """Output directory from $TOWLAB_OUTPUT_DIR, else ./towlab_results."""
    return os.environ.get(OUTPUT_DIR_ENV) or os.path.join(os.getcwd(), DEFAULT_OUTPUT_DIR)


def create_result_filename(directory, measurement_type, notes="", type="csv"):
    """
    Creates the path of a result file, creating the target directory if needed.

    Unlike a measurement log the name carries no running index: the same configuration
    always maps to the same file, so reruns overwrite their previous output.

    :param directory: Target directory.
    :param measurement_type: Tag unique to the command, e.g. "solve" or "mvp".
    :param notes: Extra string describing the run, e.g. "p3_eps0p1".
    :param type: File extension, defaults to "csv".
    :return: Full filepath "{directory}/{measurement_type}_{notes}.{type}"
    """
    os.makedirs(directory, exist_ok=True)
    base = f"{measurement_type}_{notes}" if notes else f"{measurement_type}"
    return os.path.join(directory, f"{base}.{type}")


def format_number(value):
    """Filename friendly number: 0.1 -> '0p1', -2 -> 'm2', inf -> 'inf'."""
    if isinstance(value, float) and np.isinf(value):
        return 'inf'
    return f"{value:g}".replace('.', 'p').replace('-', 'm')


def table_to_csv(table, path):
    """Writes a DataFrame with 17 significant digit floats and no index."""
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def csv_to_table(path):
    return pd.read_csv(path)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if np.isnan(value):
            return None
        if np.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def metadata_to_json(metadata, path, stamp=True):
    """
    Writes a metadata dictionary as a sorted, indented JSON sidecar.

    :param metadata: dictionary of parameters and results
    :param path: path of the JSON file
    :param stamp: add a 'timestamp' key; with 'wall_time_s' it is the only field that changes between reruns
    """
    payload = _jsonable(dict(metadata))
    if stamp:
        payload['timestamp'] = time.time()
    with open(path, 'w') as f:
        json.dump(payload, f, indent=4, sort_keys=True)
        f.write('\n')
    return path


def json_to_metadata(path):
    with open(path) as f:
        return json.load(f)


def sidecar_path(path):
    """foo/bar.csv -> foo/bar.json"""
    return os.path.splitext(path)[0] + '.json'
