import json

import pytest

from scriptid.cli import EXIT_CEILING, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from scriptid.raster import BinaryRaster, save


@pytest.fixture()
def corpus(tmp_path):
    out = tmp_path / "corpus"
    rc = main(
        ["generate", "--output-dir", str(out), "--script", "Arabic", "--words", "5",
         "--seed", "41", "--output", str(tmp_path / "gen.json")]
    )
    assert rc == EXIT_OK
    return out


def run_to_file(args, path):
    rc = main(args + ["--output", str(path)])
    return rc, path.read_bytes()


class TestGenerate:
    def test_writes_images_and_truth(self, corpus):
        images = sorted(p.name for p in corpus.glob("*.pbm"))
        assert len(images) == 5
        assert (corpus / "truth.txt").exists()

    def test_pages_mode(self, tmp_path):
        out = tmp_path / "pages"
        rc = main(
            ["generate", "--output-dir", str(out), "--script", "Latin", "--pages", "2",
             "--seed", "1", "--output", str(tmp_path / "g.json")]
        )
        assert rc == EXIT_OK
        assert "SCRIPT=Latin" in (out / "truth.txt").read_text()

    def test_unknown_script_is_usage_error(self, tmp_path):
        rc = main(["generate", "--output-dir", str(tmp_path / "x"), "--script", "Klingon"])
        assert rc == EXIT_USAGE


class TestFeatures:
    def test_directory_entries_in_filename_order(self, corpus, tmp_path):
        rc, raw = run_to_file(["features", "--input", str(corpus)], tmp_path / "f.json")
        assert rc == EXIT_OK
        report = json.loads(raw)
        assert report["schema"] == "scriptid-report/1"
        names = [e["image"] for e in report["images"]]
        assert names == sorted(names)
        assert len(names) == 5

    def test_blank_image_reported_and_run_continues(self, corpus, tmp_path):
        save(BinaryRaster.blank(20, 20), corpus / "aa_blank.pbm")
        rc, raw = run_to_file(["features", "--input", str(corpus)], tmp_path / "f.json")
        assert rc == EXIT_OK
        report = json.loads(raw)
        blank_entry = report["images"][0]
        assert blank_entry["image"] == "aa_blank.pbm"
        assert blank_entry["error"] == "blank image"
        assert all("counts" in e for e in report["images"][1:])

    def test_unreadable_image_reported_per_file(self, corpus, tmp_path):
        (corpus / "bad.pbm").write_bytes(b"not a bitmap")
        rc, raw = run_to_file(["features", "--input", str(corpus)], tmp_path / "f.json")
        assert rc == EXIT_OK
        entry = next(e for e in json.loads(raw)["images"] if e["image"] == "bad.pbm")
        assert "error" in entry

    def test_missing_input_is_io_error(self, tmp_path):
        rc = main(["features", "--input", str(tmp_path / "nowhere")])
        assert rc == EXIT_IO

    def test_single_file_input(self, corpus, tmp_path):
        target = sorted(corpus.glob("*.pbm"))[0]
        rc, raw = run_to_file(["features", "--input", str(target)], tmp_path / "one.json")
        assert rc == EXIT_OK
        assert len(json.loads(raw)["images"]) == 1


class TestClassify:
    def test_page_labels(self, tmp_path):
        for script in ("Arabic", "Latin"):
            out = tmp_path / script.lower()
            main(["generate", "--output-dir", str(out), "--script", script,
                  "--pages", "2", "--seed", "5", "--output", str(tmp_path / "g.json")])
            rc, raw = run_to_file(["classify", "--input", str(out)], tmp_path / "c.json")
            assert rc == EXIT_OK
            labels = [e["label"] for e in json.loads(raw)["images"]]
            assert labels == [script, script]

    def test_blank_page_is_unknown(self, tmp_path):
        save(BinaryRaster.blank(40, 40), tmp_path / "blank.pbm")
        rc, raw = run_to_file(
            ["classify", "--input", str(tmp_path / "blank.pbm")], tmp_path / "c.json"
        )
        assert rc == EXIT_OK
        assert json.loads(raw)["images"][0]["label"] == "Unknown"


class TestEvaluate:
    def test_clean_round_trip_is_exact(self, corpus, tmp_path, capsys):
        rc, raw = run_to_file(["evaluate", "--input", str(corpus)], tmp_path / "e.json")
        assert rc == EXIT_OK
        report = json.loads(raw)["report"]
        for row in report["per_feature"].values():
            assert row["error_rate"] == 0.0
        table = capsys.readouterr().out
        assert "Feature" in table and "Error rate" in table

    def test_ceiling_breach_exits_3(self, corpus, tmp_path):
        # inflate the expected pole counts so extraction under-counts badly
        truth = corpus / "truth.txt"
        doctored = []
        for line in truth.read_text().splitlines():
            fields = line.split()
            fields[1] = "H=9"
            doctored.append(" ".join(fields))
        truth.write_text("\n".join(doctored) + "\n")
        rc = main(["evaluate", "--input", str(corpus), "--ceiling", "10"])
        assert rc == EXIT_CEILING

    def test_missing_truth_is_io_error(self, corpus):
        (corpus / "truth.txt").unlink()
        rc = main(["evaluate", "--input", str(corpus)])
        assert rc == EXIT_IO

    def test_explicit_truth_path(self, corpus, tmp_path):
        moved = tmp_path / "elsewhere.txt"
        moved.write_text((corpus / "truth.txt").read_text())
        rc = main(["evaluate", "--input", str(corpus), "--truth", str(moved)])
        assert rc == EXIT_OK


class TestUsage:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_required_flag(self):
        assert main(["features"]) == EXIT_USAGE


class TestDeterminism:
    def test_reports_are_byte_identical(self, corpus, tmp_path):
        for command, extra in [
            (["features", "--input", str(corpus)], []),
            (["classify", "--input", str(corpus)], []),
            (["evaluate", "--input", str(corpus)], []),
        ]:
            _, first = run_to_file(command + extra, tmp_path / "a.json")
            _, second = run_to_file(command + extra, tmp_path / "b.json")
            assert first == second, command[0]

    def test_generate_is_byte_identical(self, tmp_path):
        blobs = []
        for name in ("g1", "g2"):
            out = tmp_path / name
            main(["generate", "--output-dir", str(out), "--script", "Latin",
                  "--words", "4", "--seed", "77", "--output", str(tmp_path / f"{name}.json")])
            blobs.append(
                {p.name: p.read_bytes() for p in sorted(out.iterdir())}
            )
        assert blobs[0] == blobs[1]
