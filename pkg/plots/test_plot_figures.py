"""Tests for the figure-rendering script, including the end-to-end pipeline
through the `relaylab figures` CLI (the secondary acceptance check)."""

import subprocess
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plot_figures import (DEFAULT_GROUP_BY, FigureSpec, SchemaError, main,
                          read_rows, render, render_all)

HEADER = ("scenario,snr_db,n_relays,rho_f1,rho_f2,rho_e,modulation,trials,"
          "ser_mc,ci_low,ci_high,ser_asymptotic,ser_integral,diversity_order,note")

ROWS = [
    "demo/a,0,2,1,1,1,BPSK,20000,0.25,0.24,0.26,3.7,0.23,2,",
    "demo/a,10,2,1,1,1,BPSK,20000,0.03,0.028,0.033,0.037,0.028,2,",
    "demo/a,20,2,1,1,1,BPSK,20000,0.0004,0.0002,0.0008,0.000375,0.00039,2,",
    "demo/b,0,4,1,1,1,BPSK,20000,0.2,0.19,0.21,2.0,0.19,4,",
    "demo/b,10,4,1,1,1,BPSK,20000,0.01,0.009,0.011,0.012,0.0098,4,",
    "demo/b,20,4,1,1,1,BPSK,20000,0,0,0.0002,1.8e-06,2.2e-06,4,zero-error",
]


def write_csv(path: Path, rows) -> Path:
    path.write_text("\n".join([HEADER, *rows]) + "\n")
    return path


class TestReadRows:
    def test_parses(self, tmp_path):
        rows = read_rows(write_csv(tmp_path / "a.csv", ROWS))
        assert len(rows) == 6
        assert rows[0]["snr_db"] == 0.0
        assert rows[5]["ser_mc"] == 0.0

    def test_missing_column(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("scenario,snr_db\nx,0\n")
        with pytest.raises(SchemaError, match="missing column"):
            read_rows(bad)

    def test_malformed_row_names_line(self, tmp_path):
        rows = ROWS[:1] + [ROWS[1].replace("0.03", "threepercent")]
        with pytest.raises(SchemaError, match="line 3"):
            read_rows(write_csv(tmp_path / "m.csv", rows))

    def test_blank_mc_fields_allowed(self, tmp_path):
        row = "demo/a,0,2,1,1,1,BPSK,0,,,,3.7,0.23,2,analytic-only"
        rows = read_rows(write_csv(tmp_path / "b.csv", [row]))
        assert rows[0]["ser_mc"] is None


class TestRender:
    def test_header_only_is_empty_success(self, tmp_path):
        src = write_csv(tmp_path / "empty.csv", [])
        out = tmp_path / "empty.png"
        fig = render(FigureSpec(input_csv=src, group_by="scenario", output=out))
        try:
            assert out.exists()
            assert not fig.axes[0].lines and not fig.axes[0].containers
        finally:
            plt.close(fig)

    def test_series_counts_and_log_axis(self, tmp_path):
        src = write_csv(tmp_path / "demo.csv", ROWS)
        out = tmp_path / "demo.png"
        fig = render(FigureSpec(input_csv=src, group_by="n_relays", output=out))
        try:
            ax = fig.axes[0]
            assert ax.get_yscale() == "log"
            assert len(ax.containers) == 2      # one errorbar set per group
            dashed = [ln for ln in ax.lines if ln.get_linestyle() == "--"]
            assert len(dashed) == 2             # one asymptote per group
        finally:
            plt.close(fig)

    def test_zero_ser_dropped_and_annotated(self, tmp_path):
        src = write_csv(tmp_path / "demo.csv", ROWS)
        out = tmp_path / "demo.png"
        fig = render(FigureSpec(input_csv=src, group_by="n_relays", output=out))
        try:
            ax = fig.axes[0]
            labels = [t.get_text() for t in ax.get_legend().get_texts()]
            assert any("zero-SER dropped" in t for t in labels)
            # the n_relays=4 simulated series lost its 20 dB point
            four = [c for c in ax.containers
                    if "n_relays=4" in (c.get_label() or "")][0]
            assert len(four.lines[0].get_xdata()) == 2
        finally:
            plt.close(fig)

    def test_unknown_group_column(self, tmp_path):
        src = write_csv(tmp_path / "demo.csv", ROWS)
        with pytest.raises(SchemaError, match="grouping column"):
            render(FigureSpec(input_csv=src, group_by="nope",
                              output=tmp_path / "x.png"))

    def test_rerender_is_identical(self, tmp_path):
        src = write_csv(tmp_path / "demo.csv", ROWS)
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        for out in (a, b):
            plt.close(render(FigureSpec(input_csv=src, group_by="n_relays",
                                        output=out)))
        assert a.read_bytes() == b.read_bytes()


class TestCliEntry:
    def test_single_csv_mode(self, tmp_path):
        src = write_csv(tmp_path / "demo.csv", ROWS)
        out = tmp_path / "out.png"
        assert main(["--csv", str(src), "--group-by", "scenario",
                     "--out", str(out)]) == 0
        assert out.exists()

    def test_error_exit(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,result\n1,2,3\n")
        assert main(["--csv", str(bad), "--group-by", "scenario",
                     "--out", str(tmp_path / "x.png")]) == 1


@pytest.mark.slow
class TestFigurePipeline:
    """Secondary acceptance: `relaylab figures` followed by the plot script
    produces the four images with the expected series structure."""

    def test_end_to_end(self, tmp_path):
        run_dir = tmp_path / "figures-out"
        proc = subprocess.run(
            [sys.executable, "-m", "relaylab.cli", "figures",
             "--out-dir", str(run_dir), "--trials", "20000", "--workers", "2"],
            capture_output=True, text=True, timeout=1200)
        assert proc.returncode == 0, proc.stderr

        outputs = render_all(run_dir)
        assert [p.name for p in outputs] == ["fig1.png", "fig2.png",
                                             "fig3.png", "fig4.png"]
        assert all(p.exists() and p.stat().st_size > 10_000 for p in outputs)

        # inspect each figure's structure directly
        for stem, group_by in DEFAULT_GROUP_BY.items():
            fig = render(FigureSpec(input_csv=run_dir / f"{stem}.csv",
                                    group_by=group_by,
                                    output=tmp_path / f"re-{stem}.png"))
            try:
                ax = fig.axes[0]
                n_curves = 3 if stem == "fig1" else 4
                assert ax.get_yscale() == "log"
                dashed = [ln for ln in ax.lines if ln.get_linestyle() == "--"]
                assert len(dashed) == n_curves
                assert len(ax.containers) == n_curves
                labels = [t.get_text() for t in ax.get_legend().get_texts()]
                # at 20k trials the deep perfect-CSI points are all zero-SER
                if stem in ("fig1", "fig2"):
                    assert any("zero-SER dropped" in t for t in labels)
            finally:
                plt.close(fig)
