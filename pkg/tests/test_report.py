"""Figure rendering and the CLI commands that wrap it."""

from __future__ import annotations

import json

from echograsp.cli import main
from echograsp.harness import TrialRecord, write_csv
from echograsp.report import render_report


def sample_records() -> list[TrialRecord]:
    recs = []
    for sid in ("S0", "S1"):
        for t in range(6):
            recs.append(
                TrialRecord(
                    sid,
                    t,
                    (t * 3) % 10,
                    1000 + t,
                    12.0 + t * 0.7,
                    3.0 + t * 0.2,
                    t % 5 != 0,
                    None if t % 5 != 0 else "timeout",
                )
            )
    return recs


class TestRenderReport:
    def test_writes_three_nonempty_pngs(self, tmp_path) -> None:
        paths = render_report(sample_records(), tmp_path)
        assert [p.name for p in paths] == [
            "times_distribution.png",
            "times_trend.png",
            "success_rate.png",
        ]
        for p in paths:
            data = p.read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n"
            assert len(data) > 1000

    def test_empty_records_write_nothing(self, tmp_path) -> None:
        assert render_report([], tmp_path) == []


class TestCli:
    def test_trial_exit_codes_and_json(self, capsys) -> None:
        code = main(["trial", "--seed", "11", "--placement", "3"])
        out = capsys.readouterr().out.strip().splitlines()[-1]
        result = json.loads(out)
        assert code == 0
        assert result["success"] is True
        assert result["placement_index"] == 3
        assert result["t1_s"] > 0 and result["t2_s"] > 0

    def test_trial_watch_streams_json_lines(self, capsys) -> None:
        main(["trial", "--seed", "11", "--watch"])
        lines = capsys.readouterr().out.strip().splitlines()
        frames = [json.loads(line) for line in lines[:-1]]
        assert all(f["type"] == "frame" for f in frames)
        assert len(frames) > 100

    def test_trial_accepts_inline_agent_json(self, capsys) -> None:
        code = main(
            ["trial", "--seed", "11", "--agent", '{"familiar": true, "gait_speed": 0.9}']
        )
        assert code in (0, 2)  # noisy cameras: success not guaranteed
        json.loads(capsys.readouterr().out.strip().splitlines()[-1])

    def test_run_writes_records_summary_and_figures(self, tmp_path, capsys) -> None:
        cfg = {
            "subjects": [{"id": "S0"}, {"id": "S1", "agent": {"familiar": True}}],
            "trials_per_subject": 2,
            "base_seed": 3,
        }
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "out"
        code = main(["run", "--config", str(cfg_path), "--out", str(out)])
        assert code == 0
        assert (out / "records.csv").exists()
        assert (out / "records.json").exists()
        assert (out / "summary.json").exists()
        assert (out / "times_distribution.png").exists()
        assert (out / "times_trend.png").exists()
        assert (out / "success_rate.png").exists()
        table = capsys.readouterr().out
        assert "S0" in table and "overall" in table

    def test_run_no_figures_skips_pngs(self, tmp_path) -> None:
        cfg_path = tmp_path / "exp.json"
        cfg_path.write_text(
            json.dumps({"subjects": [{"id": "A"}], "trials_per_subject": 1})
        )
        out = tmp_path / "out"
        main(["run", "--config", str(cfg_path), "--out", str(out), "--no-figures"])
        assert (out / "records.csv").exists()
        assert not list(out.glob("*.png"))

    def test_summarize_recomputes_from_csv(self, tmp_path, capsys) -> None:
        csv_path = tmp_path / "records.csv"
        write_csv(sample_records(), csv_path)
        out = tmp_path / "sum"
        code = main(["summarize", "--in", str(csv_path), "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["overall"]["trials"] == 12
        assert (out / "success_rate.png").exists()
