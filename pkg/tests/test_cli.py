import json
import subprocess
import sys

import pytest

from khsing.cli import corpus_dir, main


def run(args):
    proc = subprocess.run([sys.executable, "-m", "khsing.cli", *args],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture(scope="module")
def corpus():
    return corpus_dir()


class TestHomologyCommand:
    def test_unknot_table(self, corpus):
        code, out, _ = run(["homology", str(corpus / "unknot.json")])
        assert code == 0
        assert "i=0, j=-1" in out and "i=0, j=1" in out

    def test_d1_rational(self, corpus):
        code, out, _ = run(["homology", str(corpus / "d1.json"),
                            "--ring", "q", "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        by_i = {}
        for g in payload["groups"]:
            by_i[g["i"]] = by_i.get(g["i"], 0) + g["free"]
        assert by_i == {-3: 2, 0: 2}

    def test_deformed_point(self, corpus):
        code, out, _ = run(["homology", str(corpus / "trefoil_neg.json"),
                            "--ring", "f3", "--h", "1", "--t", "1",
                            "--format", "json"])
        assert code == 0
        json.loads(out)

    def test_malformed_file_exit_one(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        code, _, err = run(["homology", str(bad)])
        assert code == 1 and "error" in err

    def test_invalid_pd_exit_one(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"pd": [[1, 2, 3, 4]]}))
        code, _, err = run(["homology", str(bad)])
        assert code == 1

    def test_missing_file_exit_one(self):
        code, _, _ = run(["homology", "/nonexistent/d.json"])
        assert code == 1

    def test_deterministic_bytes(self, corpus):
        a = run(["homology", str(corpus / "figure8.json"), "--format", "json"])
        b = run(["homology", str(corpus / "figure8.json"), "--format", "json"])
        assert a == b

    def test_threads_flag_same_output(self, corpus):
        a = run(["homology", str(corpus / "trefoil_pos.json"),
                 "--format", "json"])
        b = run(["--threads", "3", "homology",
                 str(corpus / "trefoil_pos.json"), "--format", "json"])
        assert a[0] == b[0] == 0 and a[1] == b[1]


class TestJonesCommand:
    def test_unknot(self, corpus):
        code, out, _ = run(["jones", str(corpus / "unknot.json")])
        assert code == 0
        assert json.loads(out) == {"1": 1, "-1": 1}

    def test_trefoil_matches_oracle(self, corpus):
        from khsing.diagram import parse
        from khsing.invariants import kauffman_bracket_oracle
        code, out, _ = run(["jones", str(corpus / "trefoil_pos.json")])
        assert code == 0
        d = parse((corpus / "trefoil_pos.json").read_text())
        assert json.loads(out) == kauffman_bracket_oracle(d).to_json_dict()

    def test_singular_skein(self, corpus):
        code, out, _ = run(["jones", str(corpus / "d1.json")])
        assert code == 0
        from khsing.diagram import parse
        from khsing.invariants import jones_polynomial
        d = parse((corpus / "d1.json").read_text())
        want = (jones_polynomial(d.resolve_double_point(0, 1))
                - jones_polynomial(d.resolve_double_point(0, -1)))
        assert json.loads(out) == want.to_json_dict()


class TestSkeinCheckCommand:
    def test_hopf_triple_passes(self, corpus):
        code, out, _ = run(["skein-check", str(corpus / "d1.json"),
                            str(corpus / "d2.json"), str(corpus / "d3.json")])
        assert code == 0
        payload = json.loads(out)
        assert payload["les_ok"] and payload["chi_ok"]

    def test_trefoil_triple_passes(self, corpus):
        code, out, _ = run(["skein-check",
                            str(corpus / "tref_sing_minus.json"),
                            str(corpus / "tref_sing_plus.json"),
                            str(corpus / "tref_sing.json")])
        assert code == 0

    def test_mismatched_triple_exit_one(self, corpus):
        code, _, err = run(["skein-check", str(corpus / "d2.json"),
                            str(corpus / "d1.json"), str(corpus / "d3.json")])
        assert code == 1
        assert "site" in err

    def test_wrong_singular_file_exit_one(self, corpus):
        code, _, _ = run(["skein-check", str(corpus / "d1.json"),
                          str(corpus / "d2.json"),
                          str(corpus / "fi_unknot.json")])
        assert code == 1

    def test_unknot_family_triple_passes(self, corpus):
        code, out, _ = run(["skein-check",
                            str(corpus / "unknot_kink_neg.json"),
                            str(corpus / "unknot_kink_pos.json"),
                            str(corpus / "fi_unknot.json")])
        assert code == 0
        assert json.loads(out)["les_ok"]


class TestInvarianceCommand:
    def test_bundled_corpus_passes(self):
        code, out, _ = run(["invariance"])
        assert code == 0
        assert "MISMATCH" not in out

    def test_deformed_points_pass(self):
        for ring, h, t in (("q", 0, 1), ("f2", 1, 0)):
            code, out, _ = run(["invariance", "--ring", ring,
                                "--h", str(h), "--t", str(t)])
            assert code == 0, out

    def test_mixed_group_reports_mismatch(self, corpus, tmp_path):
        for name in ("trefoil_pos", "unknot"):
            (tmp_path / f"{name}.json").write_text(
                (corpus / f"{name}.json").read_text())
        (tmp_path / "groups.json").write_text(json.dumps(
            {"groups": [{"name": "bogus",
                         "files": ["trefoil_pos", "unknot"]}]}))
        code, out, _ = run(["invariance", "--corpus", str(tmp_path)])
        assert code == 1
        assert "MISMATCH" in out


class TestInProcessMain:
    def test_main_returns_zero(self, corpus, capsys):
        assert main(["jones", str(corpus / "unknot.json")]) == 0
        capsys.readouterr()

    def test_corpus_command(self, capsys):
        assert main(["corpus"]) == 0
        out = capsys.readouterr().out.strip()
        assert (json.loads((corpus_dir() / "groups.json").read_text())
                ["groups"])
        assert out.endswith("corpus")
