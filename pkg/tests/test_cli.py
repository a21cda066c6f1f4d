import json
import subprocess
import sys

import pytest

from hmk.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mats(tmp_path, capsys):
    d = tmp_path / "m"
    specs = {"f00": ("fourier", "0,0"), "f0": ("fourier", "1/6,1/12"), "ft": ("fourier-transposed", "1/6,1/12"),
             "c": ("bjorck", ""), "s": ("tao", ""), "d0": ("dita", "0")}
    for name, (fam, params) in specs.items():
        argv = ["catalog", "build", "--family", fam, "--out", str(d / f"{name}.json")]
        if params:
            argv[4:4] = ["--params", params]
        assert run(argv, capsys)[0] == 0
    return d


def test_catalog_list(capsys):
    code, out, _ = run(["catalog", "list"], capsys)
    assert code == 0
    assert "fourier" in {f["family"] for f in json.loads(out)["families"]}


def test_catalog_build_stdout(capsys):
    code, out, _ = run(["catalog", "build", "--family", "fourier", "--params", "1/6,1/12"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["family_spec"]["params"] == ["1/6", "1/12"]


def test_bad_family_exit_2(capsys):
    code, _, err = run(["catalog", "build", "--family", "nope"], capsys)
    assert code == 2 and "error" in err


def test_equiv_exit_codes(mats, capsys):
    code, out, _ = run(["equiv", "test", str(mats / "f00.json"), str(mats / "f00.json")], capsys)
    assert code == 0 and json.loads(out)["equivalent"]
    code, out, _ = run(["equiv", "test", str(mats / "f00.json"), str(mats / "s.json")], capsys)
    assert code == 1 and not json.loads(out)["equivalent"]
    code, out, _ = run(["equiv", "test", "--unordered", str(mats / "f0.json"), str(mats / "ft.json")], capsys)
    assert code == 0


def test_distance(mats, tmp_path, capsys):
    code, out, _ = run(["distance", str(mats / "f00.json"), str(mats / "c.json")], capsys)
    assert code == 0 and 0 <= json.loads(out)["distance_sq"] <= 1
    table = tmp_path / "t.csv"
    code, out, _ = run(["distance", "--matrix-list", str(mats), "--table", str(table)], capsys)
    assert code == 0
    assert table.read_text().splitlines()[0].startswith(",c,d0")
    assert table.with_suffix(".png").exists()
    assert run(["distance", str(mats / "f00.json")], capsys)[0] == 2


def test_average(capsys, tmp_path):
    out_path = tmp_path / "avg.json"
    code, _, _ = run(["--seed", "3", "average", "--n", "2", "--samples", "20000", "--out", str(out_path)], capsys)
    doc = json.loads(out_path.read_text())
    assert code == 0 and doc["within_4_stderr"]
    assert out_path.with_suffix(".png").exists()


def test_biunimodular_formats(capsys):
    code, out, _ = run(["biunimodular", "--n", "6", "--alphabet", "roots:12"], capsys)
    assert code == 0 and json.loads(out)["count"] == 12
    code, out, _ = run(["--format", "csv", "biunimodular", "--n", "2", "--alphabet", "roots:4"], capsys)
    assert out.splitlines()[0] == "index,classical,z0_turn,z1_turn" and len(out.splitlines()) == 3
    code, out, _ = run(["--format", "text", "biunimodular", "--n", "2", "--alphabet", "roots:4"], capsys)
    assert "count: 2" in out


def test_census_and_cache(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HMK_CACHE_DIR", str(tmp_path / "cache"))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["census", "--out", str(out1)], capsys)[0] == 0
    assert list((tmp_path / "cache").glob("census-*.json"))
    assert run(["census", "--out", str(out2)], capsys)[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert json.loads(out1.read_text())["group_sizes"] == {"i": 2, "ii": 2, "iii": 6, "iv": 6}
    assert out1.with_suffix(".png").read_bytes() == out2.with_suffix(".png").read_bytes()


def test_search_triplets_deterministic(mats, tmp_path, capsys):
    outs = []
    for k in range(2):
        o = tmp_path / f"t{k}.json"
        code, _, _ = run(["search", "triplets", "--mub1", str(mats / "f00.json"), "--roots", "12",
                          "--out", str(o)], capsys)
        assert code == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["candidates"] == 4 and not doc["quartet_found"]


def test_search_big_gate(mats, capsys):
    code, _, err = run(["search", "triplets", "--mub1", str(mats / "f00.json"), "--roots", "48"], capsys)
    assert code == 2 and "--big" in err


def test_search_budget(mats, capsys):
    code, _, err = run(["--budget", "100", "search", "triplets", "--mub1", str(mats / "f00.json"),
                        "--roots", "12"], capsys)
    assert code == 2 and "SearchTooLarge" in err


def test_search_survey(tmp_path, capsys):
    o = tmp_path / "s.json"
    code, _, _ = run(["search", "survey", "--roots", "6", "--out", str(o)], capsys)
    assert code == 0
    assert "extendable" in json.loads(o.read_text())


def test_defect_commands(mats, capsys):
    code, out, _ = run(["defect", "compute", str(mats / "s.json")], capsys)
    assert code == 0 and json.loads(out)["defect"] == 0
    code, out, _ = run(["defect", "dita-expand", "--seed", "0.1,0.05,-0.02,0.03", "--order", "3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["consistent"] and 3.5 <= doc["convergence_order"] <= 4.5
    code, out, _ = run(["defect", "scan-hermitian", "--samples", "10"], capsys)
    assert code == 0 and json.loads(out)["distinct"] == [4]
    assert run(["defect", "dita-expand", "--seed", "0.9,0,0,0"], capsys)[0] == 2


def test_reproduce_section(tmp_path, capsys):
    code, out, err = run(["reproduce", "roots-357", "s8", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    assert json.loads(out)["sections"] == {"roots-357": True, "s8": True}
    assert "PASS roots-357" in err
    assert (tmp_path / "reproduce.json").exists() and (tmp_path / "reproduce.csv").exists()


def test_bad_budget(capsys):
    assert run(["--budget", "0", "catalog", "list"], capsys)[0] == 2


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "hmk.cli", "catalog", "build", "--family", "dita", "--params", "1/8"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["label"].startswith("D")
