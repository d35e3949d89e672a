import json

import pytest

from comarr.cli import main
from comarr.utils.io_formats import ConfigurationFile


def load(path):
    with open(path) as f:
        return json.load(f)


def build_file(tmp_path, family, k, t=None, name=None):
    out = str(tmp_path / (name or f"{family}{t or ''}_{k}.json"))
    argv = ["build", "--family", family, "--k", str(k), "--out", out]
    if t is not None:
        argv += ["--t", str(t)]
    assert main(argv) == 0
    return out


def test_build_m24(tmp_path):
    out = build_file(tmp_path, "M", 4, t=2)
    data = load(out)
    assert data["family"] == "M" and data["k"] == 4
    assert len(data["normals"]) == 9

    again = build_file(tmp_path, "M", 4, t=2, name="again.json")
    with open(out, "rb") as a, open(again, "rb") as b:
        assert a.read() == b.read()


def test_build_small_and_invalid(tmp_path):
    assert load(build_file(tmp_path, "Braid", 1))["normals"] == []
    assert main(["build", "--family", "M", "--t", "0", "--k", "4", "--out", str(tmp_path / "x.json")]) == 2
    assert main(["build", "--family", "M", "--k", "4", "--out", str(tmp_path / "x.json")]) == 2
    assert main(["build", "--family", "Mprime", "--k", "4", "--out", str(tmp_path / "x.json")]) == 2
    with pytest.raises(SystemExit):
        main(["build", "--family", "Q", "--k", "4", "--out", str(tmp_path / "x.json")])


def test_invariants_braid3(tmp_path):
    arr = build_file(tmp_path, "Braid", 3)
    out = str(tmp_path / "inv.json")
    assert main(["invariants", "--arr", arr, "--out", out]) == 0
    report = load(out)
    assert report["schema"] == "comarr.invariants/1"
    assert report["poincare"] == [1, 3, 2]
    assert report["regions"] == 6
    assert report["charpoly_agreement"] is True
    assert report["orlik_solomon"]["trivial"] == [1, 1, 0]
    assert report["orlik_solomon"]["braid_restriction_ranks"] == [1, 3, 2]
    assert report["manifest"]["input_hashes"]["arrangement"]
    assert report["manifest"]["timestamp"] is None


def test_invariants_trivial_arrangement(tmp_path):
    arr = build_file(tmp_path, "Braid", 1)
    out = str(tmp_path / "inv.json")
    assert main(["invariants", "--arr", arr, "--out", out, "--skip-os"]) == 0
    report = load(out)
    assert report["charpoly"] == [0, 1]
    assert report["regions"] == 1
    assert report["orlik_solomon"] is None


def test_invariants_m24(tmp_path):
    arr = build_file(tmp_path, "M", 4, t=2)
    out = str(tmp_path / "inv.json")
    assert main(["invariants", "--arr", arr, "--out", out]) == 0
    report = load(out)
    assert report["hyperplanes"] == 9
    assert report["charpoly_agreement"] is True
    assert [o["size"] for o in report["orbits"]] == [3, 6]
    assert report["orbits"][0]["representative"] == "x1+x2-x3-x4"


def test_lattice_guard(tmp_path):
    arr = build_file(tmp_path, "Braid", 4)
    config = tmp_path / "small.yaml"
    config.write_text("max_hyperplanes: 3\n")
    out = str(tmp_path / "inv.json")
    argv = ["invariants", "--arr", arr, "--out", out, "--config", str(config), "--skip-os"]
    assert main(argv) == 3
    assert main(argv + ["--force"]) == 0
    assert load(out)["manifest"]["params"]["force"] is True
    assert main(argv) == 3


def test_missing_arrangement_file(tmp_path):
    assert main(["invariants", "--arr", str(tmp_path / "none.json"), "--out", str(tmp_path / "o.json")]) == 2


def test_homology(tmp_path):
    arr = build_file(tmp_path, "Braid", 2)
    out = str(tmp_path / "hom.json")
    assert main(["homology", "--arr", arr, "--out", out]) == 0
    report = load(out)
    assert [d["rank"] for d in report["degrees"]] == [1, 1]
    assert report["cells"] == [2, 2]

    csv_path = tmp_path / "hom.csv"
    argv = ["homology", "--arr", arr, "--quotient", "--coeff", "Fp", "--p", "2", "--out", out, "--csv", str(csv_path)]
    assert main(argv) == 0
    report = load(out)
    assert report["quotient"] is True and report["p"] == 2
    assert [d["rank"] for d in report["degrees"]] == [1, 1]
    assert csv_path.read_text().splitlines()[0] == "degree,rank,torsion"


def test_homology_writes_complex(tmp_path):
    arr = build_file(tmp_path, "Braid", 3)
    complex_path = tmp_path / "cx.json"
    argv = ["homology", "--arr", arr, "--out", str(tmp_path / "hom.json"), "--complex-out", str(complex_path)]
    assert main(argv) == 0
    data = load(complex_path)
    assert [len(c) for c in data["cells"]] == [6, 12, 6]
    assert data["normals"] == [[1, -1, 0], [1, 0, -1], [0, 1, -1]]
    assert "complex_out" not in load(tmp_path / "hom.json")["manifest"]["params"]


def test_homology_rejects_bad_requests(tmp_path):
    arr = build_file(tmp_path, "Braid", 2)
    out = str(tmp_path / "hom.json")
    assert main(["homology", "--arr", arr, "--coeff", "Fp", "--p", "4", "--out", out]) == 2
    assert main(["homology", "--arr", arr, "--twist", "sign", "--out", out]) == 2


def test_compare_identity(tmp_path):
    out = str(tmp_path / "cmp.json")
    assert main(["compare", "--t", "3", "--k", "3", "--out", out]) == 0
    report = load(out)
    assert report["identity"] is True
    assert report["oracle_agreement"] is True
    assert report["non_surjective_degrees"] == []
    assert report["verdict"] == "surjective in every degree"


def test_compare_oracle_disagreement(tmp_path, monkeypatch):
    monkeypatch.setattr("comarr.models.salvetti.isotypic_restriction_rank", lambda *args, **kwargs: -1)
    out = tmp_path / "cmp.json"
    assert main(["compare", "--t", "2", "--k", "3", "--out", str(out)]) == 5
    report = load(out)
    assert report["oracle_agreement"] is False
    assert report["verdict"] is None


def test_verify_with_no_samples(tmp_path):
    out = str(tmp_path / "v.json")
    assert main(["verify", "--prop", "pullback", "--t", "2", "--k", "4", "--n", "0", "--out", out]) == 0
    report = load(out)
    assert report["checked"] == 0 and report["failed"] == 0
    assert report["manifest"]["seed"] == 0


def test_verify_stabilization_witness(tmp_path):
    out = str(tmp_path / "v.json")
    assert main(["verify", "--prop", "stabilization", "--t", "3", "--k", "4", "--n", "10", "--out", out]) == 0
    report = load(out)
    assert report["passed"] == 10
    assert report["witness"] == [[0, 1, 0, 1], [3, 1, 0, 1], [1, 1, 0, 1], [2, 1, 0, 1]]


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr("comarr.models.geometry.verify_pullback", lambda c, t: False)
    out = tmp_path / "v.json"
    assert main(["verify", "--prop", "pullback", "--t", "2", "--k", "4", "--n", "5", "--out", str(out)]) == 4
    report = load(out)
    assert report["failed"] == 5
    assert len(report["failures"]) == 5


def test_sample_is_independent_of_threads(tmp_path):
    outs = []
    for threads in ("1", "2"):
        out = str(tmp_path / f"s{threads}.json")
        argv = ["sample", "--family", "M", "--t", "2", "--k", "4", "--n", "30", "--seed", "11", "--box", "6"]
        assert main(argv + ["--threads", threads, "--out", out]) == 0
        outs.append(out)
    with open(outs[0], "rb") as a, open(outs[1], "rb") as b:
        assert a.read() == b.read()
    assert load(outs[0])["accepted"] == 30


def test_sample_rejects_empty_box(tmp_path):
    argv = ["sample", "--k", "3", "--n", "5", "--box", "0", "--out", str(tmp_path / "s.json")]
    assert main(argv) == 2


def test_stabilize(tmp_path):
    config = str(tmp_path / "c.json")
    ConfigurationFile.write(config, [[0, 1, 0, 1], [1, 1, 0, 1]])
    out = str(tmp_path / "st.json")
    assert main(["stabilize", "--config-file", config, "--t", "2", "--out", out]) == 0
    report = load(out)
    assert report["constant"] == "8"
    assert report["output"][-1] == [8, 1, 0, 1]
    assert report["inside_after"] is True
    assert report["dominates"] is True
    assert report["manifest"]["input_hashes"]["configuration"]


def test_source_date_epoch(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    out = str(tmp_path / "v.json")
    assert main(["verify", "--prop", "pullback", "--t", "2", "--k", "3", "--n", "0", "--out", out, "-q"]) == 0
    assert load(out)["manifest"]["timestamp"] == 1700000000
