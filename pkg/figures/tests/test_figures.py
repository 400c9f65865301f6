import numpy as np
import pytest

from pbgsim_figures.decay import FigureSpec as DecaySpec
from pbgsim_figures.decay import plot_decay_convergence
from pbgsim_figures.io import SchemaError, label_for, read_curve
from pbgsim_figures.two_photon import FigureSpec as TwoPhotonSpec
from pbgsim_figures.two_photon import plot_two_photon


def write_decay_csv(path, t, pe):
    rows = "\n".join(f"{a:.17g},{b:.17g},0,1,1" for a, b in zip(t, pe))
    path.write_text("t,p_excited,p_res_one,norm_sq,n_total\n" + rows + "\n")


def write_oracle_csv(path, t, pe):
    rows = "\n".join(f"{a:.17g},{b:.17g}" for a, b in zip(t, pe))
    path.write_text("t,p_excited\n" + rows + "\n")


def write_two_photon_csv(path, t):
    header = "t,p_excited,n_defect,p_res_one,p_res_two,norm_sq,n_total"
    rows = "\n".join(
        f"{x:.17g},{np.cos(x)**2:.17g},{0.5 + 0.4 * np.sin(x):.17g},"
        f"{0.3:.17g},{0.2:.17g},1,2"
        for x in t
    )
    path.write_text(header + "\n" + rows + "\n")


@pytest.fixture
def decay_inputs(tmp_path):
    t = np.linspace(0.0, 10.0, 201)
    write_oracle_csv(tmp_path / "oracle.csv", t, 0.5 + 0.5 * np.exp(-t))
    for n, rate in ((50, 0.9), (150, 0.97), (500, 0.995)):
        write_decay_csv(tmp_path / f"run_N{n}.csv", t, 0.5 + 0.5 * np.exp(-rate * t))
    return [tmp_path / p for p in ("oracle.csv", "run_N50.csv", "run_N150.csv", "run_N500.csv")]


def test_labels_from_filenames(decay_inputs):
    assert [label_for(p) for p in decay_inputs] == ["exact", "N=50", "N=150", "N=500"]


def test_decay_figure_four_curves_with_inset(tmp_path, decay_inputs):
    out = tmp_path / "fig" / "decay.svg"
    path = plot_decay_convergence(DecaySpec(inputs=tuple(decay_inputs), output=out))
    assert path.exists() and path.stat().st_size > 0
    assert b"<svg" in path.read_bytes()[:200]


def test_decay_figure_single_curve_no_inset(tmp_path, decay_inputs):
    out = tmp_path / "single.svg"
    plot_decay_convergence(DecaySpec(inputs=(decay_inputs[0],), output=out))
    assert out.exists()


def test_decay_output_is_deterministic(tmp_path, decay_inputs):
    spec1 = DecaySpec(inputs=tuple(decay_inputs), output=tmp_path / "a.svg")
    spec2 = DecaySpec(inputs=tuple(decay_inputs), output=tmp_path / "b.svg")
    a = plot_decay_convergence(spec1).read_bytes()
    b = plot_decay_convergence(spec2).read_bytes()
    assert a == b


def test_inputs_are_not_mutated(tmp_path, decay_inputs):
    before = [p.read_bytes() for p in decay_inputs]
    plot_decay_convergence(DecaySpec(inputs=tuple(decay_inputs), output=tmp_path / "o.svg"))
    assert [p.read_bytes() for p in decay_inputs] == before


def test_mismatched_grids_resample_with_warning(tmp_path):
    t1 = np.linspace(0.0, 10.0, 101)
    t2 = np.linspace(0.0, 12.0, 241)
    write_oracle_csv(tmp_path / "oracle.csv", t1, np.exp(-t1))
    write_decay_csv(tmp_path / "run_N50.csv", t2, np.exp(-0.9 * t2))
    spec = DecaySpec(
        inputs=(tmp_path / "oracle.csv", tmp_path / "run_N50.csv"),
        output=tmp_path / "o.svg",
    )
    with pytest.warns(UserWarning, match="resampling"):
        plot_decay_convergence(spec)
    assert spec.output.exists()


def test_missing_column_is_schema_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,population\n0,1\n1,0.5\n")
    with pytest.raises(SchemaError, match="missing columns"):
        plot_decay_convergence(DecaySpec(inputs=(bad,), output=tmp_path / "o.svg"))
    assert not (tmp_path / "o.svg").exists()


def test_empty_csv_is_schema_error_and_writes_nothing(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t,p_excited,n_defect,p_res_one,p_res_two,norm_sq,n_total\n")
    out = tmp_path / "o.svg"
    with pytest.raises(SchemaError, match="no data rows"):
        plot_two_photon(TwoPhotonSpec(input=empty, output=out))
    with pytest.raises(SchemaError, match="no data rows"):
        plot_decay_convergence(DecaySpec(inputs=(empty,), output=out))
    assert not out.exists()


def test_two_photon_figure(tmp_path):
    src = tmp_path / "run.csv"
    write_two_photon_csv(src, np.linspace(0.0, 20.0, 401))
    out = plot_two_photon(TwoPhotonSpec(input=src, output=tmp_path / "fig2.svg"))
    assert out.exists() and b"<svg" in out.read_bytes()[:200]


def test_two_photon_norm_overlay(tmp_path):
    src = tmp_path / "run.csv"
    write_two_photon_csv(src, np.linspace(0.0, 5.0, 101))
    plain = plot_two_photon(TwoPhotonSpec(input=src, output=tmp_path / "plain.svg"))
    qa = plot_two_photon(
        TwoPhotonSpec(input=src, output=tmp_path / "qa.svg", overlay_norm=True)
    )
    assert qa.read_bytes() != plain.read_bytes()


def test_read_curve_rejects_ragged_rows(tmp_path):
    bad = tmp_path / "ragged.csv"
    bad.write_text("t,p_excited\n0,1\n1\n")
    with pytest.raises((SchemaError, ValueError)):
        read_curve(bad, ("t", "p_excited"))


def test_cli_entry_points(tmp_path, decay_inputs):
    from pbgsim_figures import decay, two_photon

    out = tmp_path / "cli.svg"
    rc = decay.main([str(p) for p in decay_inputs] + ["-o", str(out)])
    assert rc == 0 and out.exists()

    rc = decay.main([str(tmp_path / "nope.csv"), "-o", str(tmp_path / "x.svg")])
    assert rc == 2

    src = tmp_path / "run.csv"
    write_two_photon_csv(src, np.linspace(0.0, 5.0, 51))
    out2 = tmp_path / "cli2.svg"
    assert two_photon.main([str(src), "-o", str(out2)]) == 0
    assert out2.exists()
