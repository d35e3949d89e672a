import json

import pytest

from comarr.config import Settings, get_settings, load_settings
from comarr.exceptions import InvalidInputError, ResourceLimitError
from comarr.models.arrangement_loader import ArrangementManager, get_arrangement_manager
from comarr.models.lattice import lattice_to_json
from comarr.utils.io_formats import (
    ArrangementFile,
    ConfigurationFile,
    FileValidator,
    ReportWriter,
    content_hash,
)


def test_report_writer_format(tmp_path):
    path = tmp_path / "out" / "report.json"
    ReportWriter.write_json({"b": 1, "a": [1, 2]}, str(path))
    text = path.read_text()
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1, 2], "b": 1}


def test_csv_writer(tmp_path):
    path = tmp_path / "rows.csv"
    ReportWriter.write_csv(["degree", "rank"], [[0, 1], [1, 0]], str(path))
    assert path.read_text() == "degree,rank\n0,1\n1,0\n"


def test_content_hash_is_order_independent():
    assert content_hash({"a": 1, "b": 2}) == content_hash({"b": 2, "a": 1})
    assert content_hash({"a": 1}) != content_hash({"a": 1}, salt="0.2.0")


def test_arrangement_file_round_trip(tmp_path):
    path = str(tmp_path / "braid.json")
    ArrangementFile.write(path, "Braid", 1, 3, [(1, -1, 0), (1, 0, -1), (0, 1, -1)])
    assert ArrangementFile.read(path) == ("Braid", 1, 3, [[1, -1, 0], [1, 0, -1], [0, 1, -1]])


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"family": "M", "k": 2},
        {"family": "Z", "k": 2, "normals": []},
        {"family": "M", "t": 1, "k": 2, "normals": [[1, "x"]]},
        {"family": "M", "t": 1, "k": 2, "normals": [[1, -1, 0]]},
    ],
)
def test_arrangement_file_rejects_bad_data(data):
    with pytest.raises(InvalidInputError):
        ArrangementFile.parse(data)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InvalidInputError):
        FileValidator.load_json(str(tmp_path / "nope.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInputError):
        ArrangementFile.read(str(bad))
    assert not FileValidator.is_valid_json(str(bad))


def test_configuration_file(tmp_path):
    path = str(tmp_path / "c.json")
    ConfigurationFile.write(path, [[0, 1, 0, 1], [1, 2, -3, 1]])
    assert ConfigurationFile.read(path) == [[0, 1, 0, 1], [1, 2, -3, 1]]

    wrong_k = tmp_path / "k.json"
    wrong_k.write_text(json.dumps({"k": 3, "points": [[0, 1, 0, 1]]}))
    with pytest.raises(InvalidInputError):
        ConfigurationFile.read(str(wrong_k))

    no_points = tmp_path / "p.json"
    no_points.write_text(json.dumps({"k": 0}))
    with pytest.raises(InvalidInputError):
        ConfigurationFile.read(str(no_points))


def test_load_arrangement_canonicalizes(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"family": "Braid", "t": 1, "k": 2, "normals": [[-2, 2], [1, -1]]}))
    arr = ArrangementManager().load_arrangement(str(path))
    assert arr.h.normals == [(1, -1)]

    zero = tmp_path / "z.json"
    zero.write_text(json.dumps({"family": "Braid", "t": 1, "k": 2, "normals": [[0, 0]]}))
    with pytest.raises(InvalidInputError):
        ArrangementManager().load_arrangement(str(zero))


def test_size_guard_applies_to_cached_lattices(isolated_cache):
    settings = Settings(cache_dir=str(isolated_cache), max_hyperplanes=3)
    manager = ArrangementManager(settings)
    arr = manager.build_arrangement("Braid", None, 4)
    with pytest.raises(ResourceLimitError):
        manager.lattice(arr)

    assert manager.lattice(arr, force=True).rank_counts() == [1, 6, 7, 1]
    assert (isolated_cache / "lattices" / f"{arr.key}.json").exists()
    with pytest.raises(ResourceLimitError):
        manager.lattice(arr)
    with pytest.raises(ResourceLimitError):
        ArrangementManager(settings).lattice(arr)
    assert ArrangementManager().lattice(arr).rank_counts() == [1, 6, 7, 1]


def test_lattice_cache_is_shared_across_managers(isolated_cache):
    first = ArrangementManager()
    arr = first.build_arrangement("M", 2, 4)
    lattice = first.lattice(arr)
    assert first.list_cached() == [arr.key]
    assert (isolated_cache / "lattices" / f"{arr.key}.json").exists()

    second = ArrangementManager()
    again = second.lattice(second.build_arrangement("M", 2, 4))
    assert lattice_to_json(again) == lattice_to_json(lattice)
    assert second.lattice(arr) is again


def test_cache_key_depends_on_the_arrangement():
    manager = ArrangementManager()
    m24 = manager.build_arrangement("M", 2, 4)
    assert m24.key == manager.build_arrangement("M", 2, 4).key
    assert m24.key != manager.build_arrangement("M", 2, 5).key
    assert m24.key != manager.build_arrangement("Braid", None, 4).key


def test_unreadable_cache_is_rebuilt(isolated_cache):
    manager = ArrangementManager()
    arr = manager.build_arrangement("Braid", None, 3)
    path = isolated_cache / "lattices" / f"{arr.key}.json"
    path.parent.mkdir(parents=True)
    path.write_text("garbage")
    assert manager.lattice(arr).rank_counts() == [1, 3, 1]
    manager.unload(arr)
    assert ArrangementManager().lattice(arr).rank_counts() == [1, 3, 1]


def test_global_manager_uses_global_settings(isolated_cache):
    assert get_arrangement_manager() is get_arrangement_manager()
    assert get_arrangement_manager().settings.cache_path == isolated_cache


def test_settings_from_yaml_and_env(tmp_path, monkeypatch):
    config = tmp_path / "custom.yaml"
    config.write_text("max_hyperplanes: 12\nthreads: 3\n")
    settings = load_settings(str(config))
    assert settings.max_hyperplanes == 12
    assert settings.threads == 3
    assert settings.cache_path == tmp_path / "cache"

    monkeypatch.setenv("COM_ARR_CONFIG", str(config))
    assert load_settings().threads == 3


def test_default_config_file_in_working_directory(tmp_path):
    (tmp_path / "comarr.yaml").write_text("stream_size: 16\n")
    assert get_settings().stream_size == 16


@pytest.mark.parametrize("content", ["threads: 0\n", "- a\n- b\n", "max_hyperplanes: many\n"])
def test_invalid_settings(tmp_path, content):
    config = tmp_path / "bad.yaml"
    config.write_text(content)
    with pytest.raises(InvalidInputError):
        load_settings(str(config))


def test_missing_config_file(tmp_path):
    with pytest.raises(InvalidInputError):
        load_settings(str(tmp_path / "missing.yaml"))
