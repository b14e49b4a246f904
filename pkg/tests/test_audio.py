import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kasper import audio, data_path
from kasper.audio import AudioSignal, HotwordTemplate, detect_hotword, frame_signal, pearson


def test_nyquist_is_strict():
    assert audio.validate_sampling(16000, 7999) is None
    v = audio.validate_sampling(16000, 8000)
    assert v is not None and v.minimum_rate == 16000
    assert "requires rate > 16000" in str(v)
    assert audio.validate_sampling(8000, 8000) is not None


@pytest.mark.parametrize("rate,n,frames,win", [(16000, 6400, 20, 320), (8000, 159, 0, 160), (16000, 329, 1, 320)])
def test_framing_examples(rate, n, frames, win):
    out = frame_signal(AudioSignal(rate, np.zeros(n)))
    assert len(out) == frames
    assert audio.window_length(rate) == win
    assert [f.index for f in out] == list(range(frames))


def test_empty_signal_rejected():
    with pytest.raises(audio.EmptySignal):
        frame_signal(AudioSignal(16000, []))


def test_signal_validation():
    with pytest.raises(audio.AudioError):
        AudioSignal(16000, [0.0, 1.5])
    with pytest.raises(audio.AudioError):
        AudioSignal(0, [0.0])


def test_energy_is_mean_square():
    f = frame_signal(AudioSignal(100, [0.5, -0.5]))[0]
    assert f.energy == 0.25


def _embed(env, offset, total, rate=8000, noise=0.0, seed=0):
    padded = np.full(total, 1e-4)
    padded[offset:offset + len(env)] = env
    return audio.synthesize(padded, rate, noise=noise, seed=seed)


def test_exact_template_found_at_offset():
    env = [0.1, 0.6, 0.3, 0.9]
    sig = _embed(env, 4, 12)
    assert detect_hotword(frame_signal(sig), HotwordTemplate(tuple(env))) == 4


def test_all_zero_signal_never_matches():
    frames = frame_signal(AudioSignal(8000, np.zeros(160 * 10)))
    assert detect_hotword(frames, HotwordTemplate((1.0, 4.0, 1.0))) is None


def test_noisy_embedded_template_matches_brute_force_oracle():
    env = np.array([1.0, 4.0, 1.0]) / 4.0
    sig = _embed(env, 3, 10, noise=0.01, seed=7)
    assert np.max(np.abs(sig.samples)) <= 1.0
    frames = frame_signal(sig)
    energies = [float(np.mean(f.samples ** 2)) for f in frames]
    oracle = [o for o in range(len(energies) - 2) if np.corrcoef(env, energies[o:o + 3])[0, 1] >= 0.9]
    assert detect_hotword(frames, HotwordTemplate(tuple(env), 0.9)) == oracle[0] == 3


def test_template_too_long():
    frames = frame_signal(AudioSignal(8000, np.zeros(320)))
    with pytest.raises(audio.TemplateTooLong):
        detect_hotword(frames, HotwordTemplate((1.0, 2.0, 3.0)))


def test_template_validation():
    with pytest.raises(audio.AudioError):
        HotwordTemplate((1.0,))
    with pytest.raises(audio.AudioError):
        HotwordTemplate((1.0, 2.0), threshold=0.0)


def test_pearson_zero_variance():
    assert pearson([1, 1, 1], [1, 2, 3]) == 0.0
    assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)


def test_signal_file_roundtrip(tmp_path):
    sig = audio.synthesize([0.1, 0.2], 8000, noise=0.01, seed=1)
    p = tmp_path / "x.sig"
    audio.write_signal(sig, p)
    back = audio.read_signal(p)
    assert back.rate == 8000
    assert np.array_equal(back.samples, sig.samples)


def test_bundled_fixture_detects():
    sig = audio.read_signal(data_path("scenarios/wake.sig"))
    tmpl = audio.read_template(data_path("scenarios/kasper.tmpl"))
    assert tmpl.threshold == 0.9
    assert detect_hotword(frame_signal(sig), tmpl) == 5


@settings(max_examples=60, deadline=None)
@given(scale=st.floats(min_value=0.05, max_value=1.0), seed=st.integers(0, 1000))
def test_detection_is_scale_invariant(scale, seed):
    rng = np.random.default_rng(seed)
    env = rng.uniform(0.0, 0.5, size=4)
    sig = _embed(env, int(rng.integers(0, 6)), 12, noise=0.02, seed=seed)
    frames = frame_signal(sig)
    tmpl = HotwordTemplate(tuple(env))
    scaled = frame_signal(sig.scaled(scale))
    ratio = audio.energy_envelope(scaled) / np.maximum(audio.energy_envelope(frames), 1e-300)
    assert np.allclose(ratio[audio.energy_envelope(frames) > 0], scale ** 2)
    assert detect_hotword(scaled, tmpl) == detect_hotword(frames, tmpl)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=2000), st.integers(50, 48000))
def test_detection_is_deterministic(samples, rate):
    frames = frame_signal(AudioSignal(rate, samples))
    assert all(f.energy >= 0 for f in frames)
    if len(frames) >= 2:
        tmpl = HotwordTemplate((0.0, 1.0))
        assert detect_hotword(frames, tmpl) == detect_hotword(frame_signal(AudioSignal(rate, samples)), tmpl)
