"""End-to-end CLI tests: exit codes, output layout, determinism, fit/predict.

Usage: test_cli.py <path-to-rfa-binary>
"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

BINARY = sys.argv[1]

RUN_CONFIG = """\
[data]
synthetic = "spec"

[preprocess]
k_best = 40
n_components = 8

[model]
families = ["controls", "language", "rc", "rfa"]

[cv]
folds = 4
seed = 11

[synth]
n_instances = 120
n_language_features = 60
n_factors = 5
seed = 21
"""

FILE_CONFIG = """\
[data]
ngrams = "{dir}/ngrams.csv"
topics = "{dir}/topics.csv"
factors = "{dir}/factors.csv"
outcome = "{dir}/outcome.csv"

[preprocess]
k_best = 40
n_components = 8

[model]
families = ["rfa"]

[cv]
folds = 4
seed = 11
"""

SWEEP_CONFIG = RUN_CONFIG + """
[sweep]
k_grid = [20, 40]
families = ["rfa"]
"""


def run(*args, expect=0):
    proc = subprocess.run([BINARY, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        raise AssertionError(
            f"{args}: expected exit {expect}, got {proc.returncode}\n"
            f"stdout: {proc.stdout}\nstderr: {proc.stderr}")
    return proc


def write(path, text):
    pathlib.Path(path).write_text(text)


def load_report(out_dir):
    with open(pathlib.Path(out_dir) / "report.json") as fh:
        return json.load(fh)


def main():
    work = pathlib.Path(tempfile.mkdtemp(prefix="rfa_cli_"))
    try:
        cfg = work / "run.toml"
        write(cfg, RUN_CONFIG)

        # run: report + table with all families x folds.
        out1 = work / "out1"
        run("run", "--config", str(cfg), "--out", str(out1))
        report = load_report(out1)
        assert (out1 / "table.txt").exists()
        assert [m["label"] for m in report["models"]] == \
            ["controls", "language", "rc", "rfa"]
        for model in report["models"]:
            assert len(model["folds"]) == 4
        assert report["config"] == RUN_CONFIG
        print("ok run layout")

        # determinism: byte-identical report modulo the timestamp.
        out2 = work / "out2"
        run("run", "--config", str(cfg), "--out", str(out2))
        r1, r2 = load_report(out1), load_report(out2)
        r1.pop("generated_at"), r2.pop("generated_at")
        assert r1 == r2
        print("ok determinism")

        # seed override changes the folds, hence the report.
        out3 = work / "out3"
        run("run", "--config", str(cfg), "--out", str(out3), "--seed", "99")
        r3 = load_report(out3)
        r3.pop("generated_at")
        assert r3 != r1
        print("ok seed override")

        # families flag restricts the grid.
        out4 = work / "out4"
        run("run", "--config", str(cfg), "--out", str(out4),
            "--families", "controls", "--families", "rfa")
        assert [m["label"] for m in load_report(out4)["models"]] == ["controls", "rfa"]
        print("ok families flag")

        # config errors: unknown key -> exit 2 naming the field.
        bad_cfg = work / "bad.toml"
        write(bad_cfg, RUN_CONFIG + "\n[model]\n")  # duplicate section header is fine;
        write(bad_cfg, "[data]\nsynthetic = \"spec\"\nwat = 1\n")
        proc = run("run", "--config", str(bad_cfg), "--out", str(work / "x"), expect=2)
        assert "data.wat" in proc.stderr
        print("ok config error exit 2")

        # data errors: missing outcome file -> exit 3 naming the path.
        missing_cfg = work / "missing.toml"
        write(missing_cfg, FILE_CONFIG.format(dir=work))
        proc = run("run", "--config", str(missing_cfg), "--out", str(work / "x"), expect=3)
        assert "ngrams.csv" in proc.stderr
        print("ok data error exit 3")

        # numerical failure: all-zero language features -> PCA has no variance.
        degenerate_cfg = work / "degenerate.toml"
        write(degenerate_cfg, RUN_CONFIG.replace('families = ["controls", "language", "rc", "rfa"]',
                                                 'families = ["language"]')
              + "sparsity = 1.0\n")
        run("run", "--config", str(degenerate_cfg), "--out", str(work / "x"), expect=4)
        print("ok numerical failure exit 4")

        # synth writes the standard CSVs + metadata with planted coefficients.
        synth_dir = work / "synth"
        run("synth", "--config", str(cfg), "--out", str(synth_dir))
        for name in ("ngrams.csv", "topics.csv", "factors.csv", "outcome.csv",
                     "metadata.json"):
            assert (synth_dir / name).exists(), name
        truth = json.loads((synth_dir / "metadata.json").read_text())
        assert len(truth["beta"]) == 5
        print("ok synth outputs")

        # run on the synthesized CSV files end to end.
        file_cfg = work / "file.toml"
        write(file_cfg, FILE_CONFIG.format(dir=synth_dir))
        out5 = work / "out5"
        run("run", "--config", str(file_cfg), "--out", str(out5))
        assert load_report(out5)["models"][0]["label"] == "rfa"
        print("ok csv round trip")

        # sweep: curves.csv with one row per (k, family).
        sweep_cfg = work / "sweep.toml"
        write(sweep_cfg, SWEEP_CONFIG)
        sweep_out = work / "sweep_out"
        run("sweep", "--kind", "kbest", "--config", str(sweep_cfg), "--out", str(sweep_out))
        curves = (sweep_out / "curves.csv").read_text().strip().splitlines()
        assert curves[0] == "param,value,label,mean_r2"
        assert len(curves) == 3  # header + 2 ks x 1 family
        print("ok sweep curves")

        # fit + predict round trip.
        fit_out = work / "fit_out"
        run("fit", "--config", str(cfg), "--out", str(fit_out), "--family", "rfa")
        assert (fit_out / "model.json").exists()
        pred_out = work / "pred_out"
        run("predict", "--config", str(cfg), "--out", str(pred_out),
            "--model", str(fit_out / "model.json"))
        lines = (pred_out / "predictions.csv").read_text().strip().splitlines()
        assert lines[0] == "group_id,prediction"
        assert len(lines) == 121
        print("ok fit/predict")

        print("cli tests passed")
    finally:
        shutil.rmtree(work, ignore_errors=True)


if __name__ == "__main__":
    main()
