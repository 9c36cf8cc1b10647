"""Configuration, renderers, file emitters and the command-line surface."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fvhotel import cli
from fvhotel.cli import oracle_residual, run_cli
from fvhotel.field import SeriesNotConverged
from fvhotel.config import RunConfig, SweepSpec, parse_config, read_config_file
from fvhotel.emit import (
    CSV_HEADER,
    HotelReport,
    Provenance,
    decode_pnm,
    encode_pnm,
    field_to_csv,
    read_field_csv,
    read_report,
    report_from_json,
    report_to_json,
    write_field_csv,
    write_image,
    write_report,
)
from fvhotel.grid import ComplexField, ConfigError, GridSpec, ScalarField
from fvhotel.render import render_intensity, render_phase
from fvhotel.vortex import (
    Correspondence,
    Regime,
    TrackingLossError,
    UndersampledPlaquetteError,
    Vortex,
    VortexPair,
)

SMALL = ["--nx", "48", "--ny", "48", "--half-width", "0.5e-3"]


# --- configuration ------------------------------------------------------------


def test_defaults():
    cfg = parse_config()
    assert cfg == RunConfig()
    assert cfg.optics.wavelength == 632.8e-9 and cfg.optics.z == 0.1
    assert (cfg.grid.nx, cfg.grid.ny, cfg.grid.half_width) == (512, 512, 1e-3)
    assert cfg.trunc.n_max is None and cfg.sweep is None


def test_flags():
    cfg = parse_config(flag_values={"mu": "1.5", "z": "0.1", "lambda": "632.8e-9"})
    assert cfg.mu == 1.5 and cfg.optics.z == 0.1 and cfg.optics.wavelength == 632.8e-9


@pytest.mark.parametrize(
    "key, value",
    [("mu", "abc"), ("z", "0"), ("lambda", "-1e-9"), ("nx", "8"), ("nx", "1.5"), ("tail-tol", "0"),
     ("n-max", "0"), ("width", "-1"), ("amplitude", "-2"), ("n-quad", "1023"), ("csv", "maybe")],
)
def test_bad_values_name_the_field(key, value):
    with pytest.raises(ConfigError) as exc:
        parse_config(flag_values={key: value})
    assert exc.value.field_name == key
    assert str(exc.value).startswith(key)


def test_file_then_flags(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nmu = 1.44\nz = 0.2\nhalf_width = 2e-3\nn-max = auto\n\n")
    values = read_config_file(path)
    cfg = parse_config(values, {"z": "0.3"})
    assert cfg.mu == 1.44 and cfg.optics.z == 0.3 and cfg.grid.half_width == 2e-3


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("mu 1.5\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    bad.write_text("colour = red\n")
    with pytest.raises(ConfigError) as exc:
        read_config_file(bad)
    assert exc.value.field_name == "colour"
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.cfg")


def test_sweep_spec():
    s = SweepSpec(1.44, 1.7, 0.01)
    vals = s.values()
    assert len(vals) == 27 and vals[0] == 1.44 and vals[-1] == 1.7 and 1.5 in vals
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ConfigError):
        SweepSpec(1.0, 0.5, 0.1)
    with pytest.raises(ConfigError):
        SweepSpec(1.0, 2.0, 0.0)
    with pytest.raises(ConfigError) as exc:
        parse_config(flag_values={"from": "1.0", "to": "2.0"})
    assert exc.value.field_name == "step"


def test_digest_ignores_output_location():
    a = parse_config(flag_values={"mu": "1.5", "out": "a"})
    b = parse_config(flag_values={"mu": "1.5", "out": "b"})
    c = parse_config(flag_values={"mu": "1.53"})
    assert a.digest() == b.digest() != c.digest()


# --- renderers ---------------------------------------------------------------


def test_constant_field_renders_blue():
    grid = GridSpec(1e-3, 16, 20)
    img = render_phase(ComplexField(grid, np.ones(grid.shape)))
    assert img.shape == (20, 16, 3) and img.dtype == np.uint8
    assert np.all(img == [0, 0, 255])


def test_hue_runs_blue_to_red():
    grid = GridSpec(1e-3, 16, 16)
    for phase, rgb in [(0.0, (0, 0, 255)), (math.pi, (0, 255, 0)), (2 * math.pi - 1e-9, (255, 0, 0))]:
        img = render_phase(ComplexField(grid, np.full(grid.shape, np.exp(1j * phase))))
        assert tuple(img[0, 0]) == rgb
    # H = 240 (1 - phase / 2 pi): a quarter turn is hue 180 (cyan)
    img = render_phase(ComplexField(grid, np.full(grid.shape, 1j)))
    assert tuple(img[0, 0]) == (0, 255, 255)


def test_low_amplitude_is_black():
    grid = GridSpec(1e-3, 16, 16)
    vals = np.ones(grid.shape, dtype=complex)
    vals[2, 3] = 1e-5
    img = render_phase(ComplexField(grid, vals))
    assert tuple(img[2, 3]) == (0, 0, 0) and tuple(img[0, 0]) == (0, 0, 255)


def test_integer_field_full_hue_wheel():
    from fvhotel.field import fractional_field_grid
    from fvhotel.grid import OpticalConfig

    grid = GridSpec(0.5e-3, 64, 64)
    img = render_phase(fractional_field_grid(1.0, grid, OpticalConfig()))
    ring = [img[32 + int(round(20 * math.sin(t))), 32 + int(round(20 * math.cos(t)))] for t in np.linspace(0, 2 * math.pi, 36, endpoint=False)]
    hues = {tuple(int(c) for c in px) for px in ring}
    assert len(hues) > 20  # every sector has its own colour


def test_intensity_render():
    grid = GridSpec(1e-3, 16, 16)
    assert not render_intensity(ScalarField(grid, np.zeros(grid.shape))).any()
    vals = np.linspace(0, 3, 256).reshape(16, 16)
    img = render_intensity(ScalarField(grid, vals))
    assert img.dtype == np.uint8 and img.max() == 255 and img.min() == 0
    assert img[8, 0] == round(255 * vals[8, 0] / 3)
    with pytest.raises(ValueError):
        render_intensity(ScalarField(grid, -vals))


# --- emitters ------------------------------------------------------------------


def test_csv_zero_field():
    grid = GridSpec(1e-3, 16, 16)
    small = ComplexField(grid, np.zeros(grid.shape))
    text = field_to_csv(small)
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 1 + 256
    assert lines[1] == "-0.001,-0.001,0,0"
    # row-major: x runs fastest
    assert lines[2].split(",")[1] == "-0.001"


def test_csv_round_trip(tmp_path):
    grid = GridSpec(1e-3, 16, 17)
    rng = np.random.default_rng(0)
    f = ComplexField(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
    table = read_field_csv(write_field_csv(tmp_path / "f.csv", f))
    np.testing.assert_array_equal(table[:, 2] + 1j * table[:, 3], f.values.ravel())
    xx, yy = grid.mesh()
    np.testing.assert_array_equal(table[:, 0], xx.ravel())
    np.testing.assert_array_equal(table[:, 1], yy.ravel())


@settings(max_examples=30)
@given(st.integers(1, 9), st.integers(1, 9), st.booleans(), st.integers(0, 2**32 - 1))
def test_pnm_round_trip(h, w, colour, seed):
    rng = np.random.default_rng(seed)
    shape = (h, w, 3) if colour else (h, w)
    img = rng.integers(0, 256, size=shape, dtype=np.uint8)
    data = encode_pnm(img)
    assert data.startswith(b"P6\n" if colour else b"P5\n")
    assert data.endswith(img.tobytes())
    np.testing.assert_array_equal(decode_pnm(data), img)


def test_pnm_header_exact(tmp_path):
    img = np.zeros((2, 3), dtype=np.uint8)
    assert write_image(tmp_path / "a.pgm", img).read_bytes() == b"P5\n3 2\n255\n" + bytes(6)
    with pytest.raises(ValueError):
        encode_pnm(img.astype(float))


def _report(pairs):
    return HotelReport(1.53, Regime.POST_HALF, Correspondence.INF_PLUS_ONE_TO_INF, 1, pairs,
                       Provenance("abc", "0.1.0", "2026-01-01T00:00:00+00:00"))


def test_report_key_order():
    rep = _report([VortexPair(Vortex(1e-4, 2e-5, 1), Vortex(3e-4, 1e-5, -1)), VortexPair(Vortex(4e-4, 0.0, 1))])
    d = json.loads(report_to_json(rep))
    assert list(d) == ["mu", "regime", "correspondence", "central_charge", "pairs", "provenance"]
    assert list(d["pairs"][0]) == ["room", "guest", "separation", "annihilated"]
    assert d["pairs"][1]["guest"] is None and d["pairs"][1]["separation"] is None
    assert d["pairs"][1]["annihilated"] is True
    assert list(d["provenance"]) == ["config_hash", "tool_version", "timestamp"]


coords = st.floats(-1e-3, 1e-3, allow_nan=False, allow_subnormal=False)


@settings(max_examples=60)
@given(st.lists(st.tuples(coords, coords, st.one_of(st.none(), st.tuples(coords, coords))), max_size=6))
def test_report_round_trip(raw):
    pairs = []
    for x, y, g in raw:
        guest = None if g is None or (g[0], g[1]) == (x, y) else Vortex(g[0], g[1], -1)
        pairs.append(VortexPair(Vortex(x, y, 1), guest))
    rep = _report(pairs)
    assert report_from_json(report_to_json(rep)) == rep


def test_report_file_round_trip(tmp_path):
    rep = _report([VortexPair(Vortex(0.1, 0.2, 1))])
    assert read_report(write_report(tmp_path / "r.json", rep)) == rep


def test_write_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError) as exc:
        write_image(blocker / "sub" / "a.pgm", np.zeros((2, 2), dtype=np.uint8))
    assert str(blocker) in str(exc.value)


# --- CLI ----------------------------------------------------------------------


def test_cli_simulate(tmp_path, capsys):
    assert run_cli(["simulate", "--mu", "1.5", *SMALL, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("mu,") and out[1].startswith("1.5,")
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["field_mu1.5.csv", "phase_mu1.5.png", "phase_mu1.5.ppm"]
    img = decode_pnm((tmp_path / "phase_mu1.5.ppm").read_bytes())
    assert img.shape == (48, 48, 3)


def test_cli_switches(tmp_path):
    assert run_cli(["simulate", "--mu", "1.5", *SMALL, "--out", str(tmp_path), "--no-figures", "--no-csv"]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["phase_mu1.5.ppm"]


def test_cli_config_error_exit(capsys):
    assert run_cli(["simulate", "--z", "0"]) == 1
    assert "z" in capsys.readouterr().err
    assert run_cli(["simulate", "--mu", "abc"]) == 1
    assert "mu" in capsys.readouterr().err
    assert run_cli(["nonsense"]) == 1
    assert run_cli([]) == 1


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 1.7\nnx = 48\nny = 48\nhalf-width = 0.5e-3\nfigures = false\n")
    assert run_cli(["detect", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "x,y,charge" and (tmp_path / "vortices_mu1.7.csv").exists()


@pytest.mark.parametrize(
    "exc",
    [UndersampledPlaquetteError("ambiguous", [(1, 2)]), TrackingLossError("tie"), SeriesNotConverged("slow")],
)
def test_cli_numerical_failure_exit(monkeypatch, tmp_path, capsys, exc):
    def boom(*args, **kwargs):
        raise exc

    monkeypatch.setattr(cli, "fractional_field_grid", boom)
    assert run_cli(["hotel", "--mu", "1.5", *SMALL, "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "numerical failure" in err and type(exc).__name__ in err


def test_cli_io_error_exit(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run_cli(["simulate", "--mu", "1.5", *SMALL, "--out", str(blocker / "out")]) == 1
    assert str(blocker) in capsys.readouterr().err


def test_cli_interfere(tmp_path, capsys):
    assert run_cli(["interfere", "--mu", "1", "--nx", "128", "--ny", "128", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "kind,x,y,charge,orientation"
    assert sum(line.startswith("dislocation") for line in out) == 1
    img = decode_pnm((tmp_path / "interferogram_mu1.pgm").read_bytes())
    assert img.shape == (128, 128)


def test_cli_oracle_check(tmp_path, capsys):
    assert run_cli(["oracle-check", "--mu", "1.5", *SMALL, "--out", str(tmp_path)]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[1]) < 5e-2


def test_cli_sweep(tmp_path, capsys):
    args = ["sweep", "--from", "1.3", "--to", "1.34", "--step", "0.02", *SMALL, "--out", str(tmp_path)]
    assert run_cli(args) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["1.3", "1.32", "1.34"]
    doc = json.loads((tmp_path / "sweep_mu1.3-1.34.json").read_text())
    assert [s["regime"] for s in doc["states"]] == ["PRE_HALF"] * 3
    assert run_cli(["sweep", "--from", "1.3", "--to", "1.34", *SMALL]) == 1


def test_oracle_residual_zero_for_identical():
    grid = GridSpec(1e-3, 16, 16)
    f = ComplexField(grid, np.ones(grid.shape))
    assert oracle_residual(f, f) == 0.0


def _snapshot(path):
    out = {}
    for p in sorted(path.iterdir()):
        data = p.read_bytes()
        if p.suffix == ".json":
            d = json.loads(data)
            if "provenance" in d:
                d["provenance"].pop("timestamp")
            data = json.dumps(d).encode()
        if p.suffix != ".png":
            out[p.name] = data
    return out


def test_cli_deterministic(tmp_path):
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        for cmd in ("simulate", "interfere", "hotel"):
            assert run_cli([cmd, "--mu", "1.44", *SMALL, "--out", str(out)]) == 0
        runs.append(_snapshot(out))
    assert runs[0] == runs[1]
    assert {"field_mu1.44.csv", "phase_mu1.44.ppm", "interferogram_mu1.44.pgm", "hotel_mu1.44.json"} <= set(runs[0])
