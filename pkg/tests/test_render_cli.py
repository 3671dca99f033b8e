import hashlib
import json
import math

import numpy as np
import pytest

from quadyn import io
from quadyn.cli import main
from quadyn.errors import DomainError
from quadyn.render import (PUZZLE_COLOR, RenderSpec, interior_fraction, nearest_pixel,
                           ppm_bytes, render, save_image)

# sha256 of the PPM bytes of 128x128 renders, width 4, 128 iterations
GOLDEN = {
    0j: "6758fb7d1eecda13504570f18f28dacbe72c94253b09fd4d36d4e0cc47d2a7c6",
    -1 + 0j: "b249f60e48cb5f849706206b90091c15a7847c96ee71dd49d4d6d4af5510adf1",
    1j: "74caa1a6f1f7ef6b4bd1e7693c466ecd8978e207b152bf2aef8de2500a93c1b0",
}


def test_unit_disk_interior():
    spec = RenderSpec(c=0j, resolution=(256, 256))
    r = render(spec)
    assert interior_fraction(r) == pytest.approx(math.pi / 16, rel=0.02)
    assert r.interior[nearest_pixel(spec, 0j)]
    assert not r.interior[nearest_pixel(spec, 1.2)]
    assert r.rgb.shape == (256, 256, 3) and r.rgb.dtype == np.uint8


def test_puzzle_overlay_draws_piece_boundaries(get_puzzle):
    spec = RenderSpec(c=-1 + 0j, resolution=(256, 256), puzzle_depth=2)
    r = render(spec)
    assert not r.warnings
    yellow = (r.rgb == np.array(PUZZLE_COLOR, dtype=np.uint8)).all(axis=-1)
    p = get_puzzle(-1, 2)
    hits = total = 0
    for piece in p.pieces(2):
        for z in p.boundary(piece):
            k, j = nearest_pixel(spec, z)
            if 0 <= k < 256 and 0 <= j < 256:
                total += 1
                hits += bool(yellow[max(k - 1, 0):k + 2, max(j - 1, 0):j + 2].any())
    assert total > 0 and hits / total > 0.95


def test_overlay_failure_becomes_warning():
    r = render(RenderSpec(c=0.5, resolution=(64, 64), rays=(0.0,)))
    assert r.rgb.shape == (64, 64, 3)
    assert len(r.warnings) == 1 and "DisconnectedJulia" in r.warnings[0]


def test_spec_validation():
    with pytest.raises(DomainError):
        RenderSpec(target="mandelbrot", rays=(0.0,))
    with pytest.raises(DomainError):
        RenderSpec(resolution=(8, 8))
    with pytest.raises(DomainError):
        RenderSpec(width=0)


@pytest.mark.parametrize("c", list(GOLDEN))
def test_golden_renders(c):
    r = render(RenderSpec(c=c, resolution=(128, 128), max_iter=128))
    assert hashlib.sha256(ppm_bytes(r.rgb)).hexdigest() == GOLDEN[c]


def test_saved_files_are_identical(tmp_path):
    spec = RenderSpec(c=-0.12256116687665 + 0.74486176661974j, resolution=(96, 64),
                      rays=(1 / 7, 2 / 7, 4 / 7), equipotentials=(2.0,))
    for ext in ("png", "ppm"):
        save_image(render(spec), tmp_path / f"a.{ext}")
        save_image(render(spec), tmp_path / f"b.{ext}")
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()
    assert (tmp_path / "a.ppm").read_bytes().startswith(b"P6\n96 64\n255\n")


def test_mandelbrot_render():
    r = render(RenderSpec(target="mandelbrot", center=-0.5, width=3.0, resolution=(96, 64)))
    spec = r.spec
    assert r.interior[nearest_pixel(spec, -1.0)]
    assert not r.interior[nearest_pixel(spec, 0.4 + 0.9j)]


def test_cli_plain_output(capsys):
    assert main(["tau", "--c", "-1,0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "tau(1) -1" and lines[-1] == "tau(10) 8"


def test_cli_json_output(capsys):
    assert main(["misiurewicz", "--seed", "-1.9,0", "--m", "2", "--k", "1", "--json"]) == 0
    obj = io.loads(capsys.readouterr().out)
    assert obj.c == -2 and obj.multiplier == 4


def test_cli_csv_output(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert main(["moduli", "--c", "-2", "--depth", "3", "--resolution", "64",
                 "--out", str(out)]) == 0
    rows = io.import_(out)
    assert [r[0] for r in rows] == [0, 1, 2]


def test_cli_render_file(tmp_path):
    out = tmp_path / "j.png"
    assert main(["render", "--c", "-1,0", "--size", "64,64", "--rays", "1/3", "2/3",
                 "--out", str(out)]) == 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_exit_codes(capsys):
    assert main(["ray", "--c", "0.5", "--theta", "0"]) == 2
    assert "DisconnectedJulia" in capsys.readouterr().err
    assert main(["superstable", "--n", "3", "--seed", "1e300,0"]) == 3
    assert "NewtonFailed" in capsys.readouterr().err


def test_cli_negative_option_values(capsys):
    assert main(["superstable", "--n", "2", "--seed", "-0.9,0", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == io.SCHEMA
