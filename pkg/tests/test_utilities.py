import math
import os

import numpy as np
import pandas as pd

from towlab.analysis.utilities import (create_result_filename, csv_to_table, default_output_dir, format_number,
                                       json_to_metadata, metadata_to_json, sidecar_path, table_to_csv)


def test_format_number():
    assert format_number(0.1) == '0p1'
    assert format_number(3.0) == '3'
    assert format_number(-2) == 'm2'
    assert format_number(math.inf) == 'inf'


def test_result_filename_creates_the_directory(tmp_path):
    target = tmp_path / "nested" / "dir"
    path = create_result_filename(str(target), 'solve', 'p3')
    assert path == os.path.join(str(target), 'solve_p3.csv')
    assert target.is_dir()
    assert create_result_filename(str(target), 'oracle').endswith('oracle.csv')
    assert sidecar_path(path) == os.path.join(str(target), 'solve_p3.json')


def test_default_output_dir(output_dir):
    assert default_output_dir() == str(output_dir)


def test_tables_keep_full_precision(tmp_path):
    table = pd.DataFrame({'x1': [0.1, 1.0 / 3.0], 'class': ['interior', 'strip'], 'value': [np.pi, -1e-300]})
    path = table_to_csv(table, str(tmp_path / "t.csv"))
    pd.testing.assert_frame_equal(csv_to_table(path), table)


def test_metadata_sidecar(tmp_path):
    path = str(tmp_path / "m.json")
    metadata_to_json({'limit': math.nan, 'p': math.inf, 'count': np.int64(3), 'ok': np.bool_(True),
                      'eps': np.array([0.1, 0.05])}, path)
    loaded = json_to_metadata(path)
    assert loaded['limit'] is None
    assert loaded['p'] == 'inf'
    assert loaded['count'] == 3
    assert loaded['ok'] is True
    assert loaded['eps'] == [0.1, 0.05]
    assert 'timestamp' in loaded
    metadata_to_json({'a': 1}, path, stamp=False)
    assert json_to_metadata(path) == {'a': 1}
