"""End-to-end checks of the gsaudio command-line tool.

Usage: test_cli.py <gsaudio binary> <schema dir>
"""

import json
import os
import struct
import subprocess
import sys
import tempfile
import unittest
import wave
from pathlib import Path

import jsonschema

BINARY = None
SCHEMAS = None


def schema(name):
    with open(SCHEMAS / name) as f:
        return jsonschema.Draft202012Validator(json.load(f))


def run(*args, check=True):
    proc = subprocess.run([str(BINARY), *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr}")
    return proc


def write_silence(path, samples, rate=22050):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(b"\x00\x00" * samples)


def float_samples(path):
    # gsaudio writes canonical 44-byte-header float32 files.
    payload = Path(path).read_bytes()[44:]
    return struct.unpack(f"<{len(payload) // 4}f", payload)


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls.tmp.name)
        cls.config = cls.root / "run.json"
        cls.config.write_text(json.dumps({
            "mode": "binaural",
            "seed": 4,
            "threads": 1,
            "dataset": str(cls.root / "data"),
            "out": str(cls.root / "run"),
            "scene_points": 96,
            "data": {"samples": 10, "duration_sec": 0.2},
            "train": {"iterations": 30, "eval_interval": 10, "mask_width": 32, "densify_interval": 15},
        }))
        run("gen-data", "--config", cls.config, "--out", cls.root / "data")
        run("train", "--config", cls.config)
        cls.checkpoint = cls.root / "run" / "final"

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_default_dataset_has_100_samples(self):
        out = self.root / "default"
        report = json.loads(run("gen-data", "--out", out).stdout)
        self.assertEqual(report["samples"], 100)
        manifest = json.loads((out / "manifest.json").read_text())
        splits = [s["split"] for s in manifest["samples"]]
        self.assertEqual(splits.count("train"), 80)
        self.assertEqual(splits.count("val"), 20)

    def test_too_few_samples_is_a_config_error(self):
        proc = run("gen-data", "--config", self.config, "--out", self.root / "few", "--samples", 3, check=False)
        self.assertEqual(proc.returncode, 1)
        self.assertIn("5", proc.stderr)

    def test_same_seed_same_manifest(self):
        a, b = self.root / "same_a", self.root / "same_b"
        run("gen-data", "--config", self.config, "--out", a)
        run("gen-data", "--config", self.config, "--out", b)
        self.assertEqual((a / "manifest.json").read_bytes(), (b / "manifest.json").read_bytes())
        self.assertEqual((a / "binaural" / "003.wav").read_bytes(), (b / "binaural" / "003.wav").read_bytes())

    def test_unwritable_output_is_an_io_error(self):
        proc = run("gen-data", "--config", self.config, "--out", "/proc/gsaudio/nope", check=False)
        self.assertEqual(proc.returncode, 3)
        self.assertIn("/proc/gsaudio/nope", proc.stderr)

    def test_unknown_config_key_is_rejected(self):
        bad = self.root / "bad.json"
        bad.write_text(json.dumps({"seed": 1, "train": {"learning_rate": 0.1}}))
        proc = run("train", "--config", bad, check=False)
        self.assertEqual(proc.returncode, 1)
        self.assertIn("learning_rate", proc.stderr)

    def test_metrics_log_line_count(self):
        lines = (self.root / "run" / "metrics.jsonl").read_text().splitlines()
        self.assertEqual(len(lines), 30 // 10 + 1)
        validator = schema("metrics.schema.json")
        for line in lines:
            validator.validate(json.loads(line))

    def test_resume_reproduces_the_next_eval(self):
        out = self.root / "resume"
        run("train", "--config", self.config, "--out", out, "--iterations", 20)
        run("train", "--config", self.config, "--out", out, "--resume", out / "final")
        self.assertEqual((out / "metrics.jsonl").read_bytes(), (self.root / "run" / "metrics.jsonl").read_bytes())

    def test_non_finite_loss_exits_2_with_a_diagnostic(self):
        cfg = json.loads(self.config.read_text())
        cfg["out"] = str(self.root / "nan")
        cfg["train"].update({"lr_alpha": 1e300, "lr_field": 1e300, "lr_binauralizer": 1e300})
        path = self.root / "nan.json"
        path.write_text(json.dumps(cfg))
        proc = run("train", "--config", path, check=False)
        self.assertEqual(proc.returncode, 2)
        diagnostic = self.root / "nan" / "diagnostic.json"
        self.assertIn(str(diagnostic), proc.stderr)
        self.assertIn("sample_id", json.loads(diagnostic.read_text()))

    def test_silent_input_renders_silence(self):
        mono, out = self.root / "silence.wav", self.root / "silent_out.wav"
        write_silence(mono, 4410)
        report = json.loads(run("render", "--checkpoint", self.checkpoint, "--input", mono,
                                "--position", 2, 2, 1.5, "--out", out).stdout)
        self.assertEqual(report["left_rms"], 0.0)
        self.assertEqual(report["right_rms"], 0.0)
        self.assertTrue(all(v == 0.0 for v in float_samples(out)))

    def test_render_outside_the_room_warns(self):
        proc = run("render", "--checkpoint", self.checkpoint, "--input", self.root / "data" / "mono" / "000.wav",
                   "--position", 40, 2, 1.5, "--out", self.root / "far.wav")
        self.assertIn("outside", proc.stderr)
        self.assertTrue((self.root / "far.wav").exists())

    def test_eval_validates_against_the_schema(self):
        out = self.root / "eval"
        report = json.loads(run("eval", "--config", self.config, "--checkpoint", self.checkpoint,
                                "--out", out).stdout)
        schema("metrics.schema.json").validate(report)
        self.assertEqual(json.loads((out / "eval_val.json").read_text()), report)
        self.assertEqual(report["samples"], 2)

    def test_eval_mode_mismatch_is_a_config_error(self):
        rir = self.root / "rir_data"
        run("gen-data", "--config", self.config, "--mode", "rir", "--out", rir)
        proc = run("eval", "--checkpoint", self.checkpoint, "--dataset", rir, check=False)
        self.assertEqual(proc.returncode, 1)
        self.assertIn("rir", proc.stderr)

    def test_rir_pipeline_reports_three_metrics(self):
        rir = self.root / "rir_pipeline"
        run("gen-data", "--config", self.config, "--mode", "rir", "--out", rir / "data")
        run("train", "--config", self.config, "--mode", "rir", "--dataset", rir / "data", "--out", rir / "run",
            "--iterations", 10)
        report = json.loads(run("eval", "--checkpoint", rir / "run" / "final", "--dataset", rir / "data",
                                "--out", rir).stdout)
        schema("metrics.schema.json").validate(report)
        for key in ("t60_error_percent", "c50_error_db", "edt_error_sec"):
            self.assertIn(key, report)

    def test_vicinity_ablation_rows(self):
        out = self.root / "ablate_v"
        text = run("ablate", "--config", self.config, "--axis", "vicinity", "--iterations", 5, "--out", out).stdout
        report = json.loads((out / "ablation_vicinity.json").read_text())
        schema("ablation.schema.json").validate(report)
        self.assertEqual([r["percentile"] for r in report["rows"]], [5, 10, 15, 20, 25])
        self.assertTrue(all("mag" in r and "env" in r for r in report["rows"]))
        self.assertEqual(len(text.strip().splitlines()), 6)
        self.assertEqual(len((out / "ablation_vicinity.csv").read_text().strip().splitlines()), 6)

    def test_alpha_init_ablation_rows(self):
        out = self.root / "ablate_a"
        run("ablate", "--config", self.config, "--axis", "alpha_init", "--iterations", 2, "--out", out)
        report = json.loads((out / "ablation_alpha_init.json").read_text())
        schema("ablation.schema.json").validate(report)
        rows = {r["parameters"]: r for r in report["rows"]}
        self.assertEqual(len(rows), 11)
        self.assertEqual(rows["SH,R"]["dimension"], 52)
        self.assertEqual(rows["S,SH,R,O"]["dimension"], 56)
        self.assertTrue(all("mag" in r and "env" in r for r in report["rows"]))

    def test_bench_records_every_render(self):
        report = json.loads(run("bench", "--checkpoint", self.checkpoint, "-n", 100).stdout)
        schema("bench.schema.json").validate(report)
        self.assertEqual(len(report["latencies_sec"]), 100)
        self.assertTrue(report["identical_audio"])
        self.assertEqual(run("bench", "--checkpoint", self.checkpoint, "-n", 5, check=False).returncode, 1)

    def test_log_level_from_environment(self):
        env = dict(os.environ, GSAUDIO_LOG="off")
        proc = subprocess.run([str(BINARY), "render", "--checkpoint", str(self.checkpoint), "--input",
                               str(self.root / "data" / "mono" / "000.wav"), "--position", "40", "2", "1.5",
                               "--out", str(self.root / "quiet.wav")], capture_output=True, text=True, env=env)
        self.assertEqual(proc.returncode, 0)
        self.assertEqual(proc.stderr, "")


if __name__ == "__main__":
    BINARY = Path(sys.argv[1]).resolve()
    SCHEMAS = Path(sys.argv[2]).resolve()
    unittest.main(argv=sys.argv[:1], verbosity=2)
