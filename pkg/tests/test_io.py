import numpy as np
import pytest

from srploc.detect import Detection
from srploc.geometry import Doa, builtin_array
from srploc.io import (
    FEATURE_MAGIC,
    read_estimates_csv,
    read_feature_file,
    read_sidecar,
    read_wav,
    write_estimates_csv,
    write_feature_file,
    write_sidecar,
    write_wav,
)
from srploc.sim import OutputTruth


def test_wav_roundtrip_float32(tmp_path):
    rng = np.random.default_rng(0)
    sig = rng.uniform(-0.5, 0.5, size=(3, 1000))
    path = tmp_path / "a.wav"
    write_wav(path, 16000, sig)
    fs, back = read_wav(path)
    assert fs == 16000
    assert back.shape == (3, 1000)
    assert np.allclose(back, sig, atol=1e-7)


def test_wav_roundtrip_pcm16(tmp_path):
    rng = np.random.default_rng(1)
    sig = rng.uniform(-0.9, 0.9, size=(2, 500))
    path = tmp_path / "b.wav"
    write_wav(path, 8000, sig, dtype="pcm16")
    fs, back = read_wav(path)
    assert fs == 8000
    assert np.allclose(back, sig, atol=1.0 / 32000)


def test_wav_write_is_deterministic(tmp_path):
    sig = np.random.default_rng(2).standard_normal((2, 256))
    p1, p2 = tmp_path / "c1.wav", tmp_path / "c2.wav"
    write_wav(p1, 16000, sig)
    write_wav(p2, 16000, sig)
    assert p1.read_bytes() == p2.read_bytes()


def test_feature_file_roundtrip_bytes(tmp_path):
    geom = builtin_array()
    rng = np.random.default_rng(3)
    feats = rng.standard_normal((5, geom.num_pairs, 64)).astype(np.float32)
    p1, p2 = tmp_path / "f1.srpf", tmp_path / "f2.srpf"
    write_feature_file(p1, feats, geom, 5.2083335)
    data = read_feature_file(p1)
    assert np.array_equal(data.features, feats)
    assert data.num_mics == 12
    assert data.num_freqs == 32
    write_feature_file(p2, data.features, geom, data.frame_rate)
    assert p1.read_bytes() == p2.read_bytes()


def test_feature_file_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.srpf"
    path.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ValueError, match="magic"):
        read_feature_file(path)


def test_feature_file_rejects_truncation(tmp_path):
    geom = builtin_array()
    feats = np.zeros((2, geom.num_pairs, 64), dtype=np.float32)
    path = tmp_path / "t.srpf"
    write_feature_file(path, feats, geom, 5.2)
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="length"):
        read_feature_file(path)


def test_feature_file_rejects_wrong_pair_table(tmp_path):
    geom = builtin_array()
    feats = np.zeros((1, geom.num_pairs, 8), dtype=np.float32)
    path = tmp_path / "p.srpf"
    write_feature_file(path, feats, geom, 5.2)
    raw = bytearray(path.read_bytes())
    # corrupt the first pair entry (header is 20 bytes)
    raw[20] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError):
        read_feature_file(path)


def test_feature_magic_constant():
    assert FEATURE_MAGIC == b"SRPF"


def test_sidecar_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    truth = OutputTruth(
        elevations=rng.uniform(0, np.pi, (2, 7)),
        azimuths=rng.uniform(-np.pi, np.pi, (2, 7)),
        betas=rng.uniform(0, 1, (2, 7)).round(4),
    )
    path = tmp_path / "truth.txt"
    write_sidecar(path, truth)
    back = read_sidecar(path)
    assert back.num_sources == 2 and back.num_frames == 7
    assert np.allclose(back.elevations, truth.elevations, atol=1e-7)
    assert np.allclose(back.azimuths, truth.azimuths, atol=1e-7)
    assert np.allclose(back.betas, truth.betas, atol=1e-7)


def test_estimates_csv_roundtrip(tmp_path):
    dets = [
        [Detection(Doa(1.0, 0.5), 0.9, 10)],
        [],
        [Detection(Doa(0.5, -2.0), 0.4, 3), Detection(Doa(2.0, 2.0), 0.3, 7)],
    ]
    path = tmp_path / "est.csv"
    write_estimates_csv(path, dets)
    back = read_estimates_csv(path)
    assert len(back) == 3
    assert back[1] == []
    assert len(back[2]) == 2
    doa, w = back[0][0]
    assert doa.elevation == pytest.approx(1.0, abs=1e-7)
    assert doa.azimuth == pytest.approx(0.5, abs=1e-7)
    assert w == pytest.approx(0.9, abs=1e-7)


def test_estimates_csv_frame_bound(tmp_path):
    path = tmp_path / "est.csv"
    write_estimates_csv(path, [[], [Detection(Doa(1.0, 1.0), 0.5, 0)]])
    with pytest.raises(ValueError):
        read_estimates_csv(path, num_frames=1)
