"""ECG preprocessing: baseline removal, R-peak detection and beat extraction.

Text record format: a header line ``fs=<Hz>,lead=<name>`` followed by one
sample (millivolts) per line. Most ECG exports (WFDB ``rdsamp``, CSV dumps of
CPSC ``.mat`` files) reduce to this by writing one lead as a column and
prepending the header.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal

from ._validation import as_vector, check_positive_real, check_seed
from .exceptions import FormatError, InsufficientPeaksError

BEAT_LENGTH = 512
R_INDEX = 150

HIGHPASS_CUTOFF_HZ = 0.5
HIGHPASS_ORDER = 2
QRS_BAND_HZ = (5.0, 15.0)
INTEGRATION_WINDOW_S = 0.150
REFRACTORY_S = 0.200
REFINE_WINDOW_S = 0.050


@dataclass(frozen=True)
class EcgRecord:
    samples: np.ndarray
    fs: float
    lead_name: str = "I"

    def __post_init__(self):
        samples = as_vector(self.samples, "samples")
        fs = check_positive_real(self.fs, "fs")
        if samples.size < 2 * fs:
            raise ValueError(
                f"record has {samples.size} samples; at least 2 s "
                f"({int(np.ceil(2 * fs))} samples) are required"
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "fs", fs)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class BeatMatrix:
    """Beats resampled to 512 samples with the R-peak at index 150."""

    beats: np.ndarray
    source_peaks: np.ndarray = field(default_factory=lambda: np.empty(0, int))
    r_index: int = R_INDEX

    def __len__(self):
        return self.beats.shape[0]


def highpass_baseline(rec, cutoff=HIGHPASS_CUTOFF_HZ):
    """Remove baseline wander with a zero-phase second-order Butterworth high-pass."""
    sos = signal.butter(HIGHPASS_ORDER, cutoff, btype="highpass", fs=rec.fs,
                        output="sos")
    padlen = 3 * (2 * len(sos) + 1)
    if len(rec) <= max(padlen, 6 * HIGHPASS_ORDER):
        raise ValueError(f"record of {len(rec)} samples is too short to filter")
    out = signal.sosfiltfilt(sos, rec.samples)
    return EcgRecord(out, rec.fs, rec.lead_name)


def _moving_average(x, width):
    return np.convolve(x, np.ones(width) / width, mode="same")


def detect_rpeaks(rec):
    """Pan-Tompkins-style R-peak detector; returns sample indices (may be empty).

    Band-pass 5-15 Hz, five-point derivative, squaring and 150 ms moving
    integration give a QRS energy envelope. Envelope maxima are classified
    with running signal/noise level estimates (threshold at a quarter of the
    way from noise to signal level, halved for a search-back when an RR gap
    exceeds 1.66 times the running mean). Each accepted maximum is moved to
    the largest-magnitude sample of the record within 50 ms, and detections
    closer than 200 ms keep only the stronger one.
    """
    x = rec.samples
    fs = rec.fs
    if not np.any(x - x.mean()):
        return np.empty(0, dtype=int)
    sos = signal.butter(2, QRS_BAND_HZ, btype="bandpass", fs=fs, output="sos")
    filtered = signal.sosfiltfilt(sos, x)
    deriv = np.convolve(filtered, np.array([1, 2, 0, -2, -1]) * fs / 8.0,
                        mode="same")
    envelope = _moving_average(deriv**2, max(1, int(round(INTEGRATION_WINDOW_S * fs))))

    refractory = max(1, int(round(REFRACTORY_S * fs)))
    candidates, _ = signal.find_peaks(envelope, distance=refractory)
    if candidates.size == 0:
        return np.empty(0, dtype=int)

    head = envelope[: int(2 * fs)]
    spk = 0.25 * head.max()
    npk = 0.5 * head.mean()
    accepted = []
    rr_mean = None
    for c in candidates:
        value = envelope[c]
        threshold = npk + 0.25 * (spk - npk)
        if value > threshold:
            if accepted and rr_mean and c - accepted[-1] > 1.66 * rr_mean:
                # search back for a missed beat between the last two detections
                lo, hi = accepted[-1] + refractory, c - refractory
                missed = candidates[(candidates > lo) & (candidates < hi)]
                missed = missed[envelope[missed] > 0.5 * threshold]
                if missed.size:
                    best = missed[np.argmax(envelope[missed])]
                    accepted.append(int(best))
                    spk = 0.25 * envelope[best] + 0.75 * spk
            if accepted:
                rr = c - accepted[-1]
                rr_mean = rr if rr_mean is None else 0.875 * rr_mean + 0.125 * rr
            accepted.append(int(c))
            spk = 0.125 * value + 0.875 * spk
        else:
            npk = 0.125 * value + 0.875 * npk

    half = max(1, int(round(REFINE_WINDOW_S * fs)))
    refined = []
    for c in sorted(accepted):
        lo, hi = max(0, c - half), min(x.size, c + half + 1)
        refined.append(lo + int(np.argmax(np.abs(x[lo:hi]))))

    peaks = []
    for p in refined:
        if peaks and p - peaks[-1] < refractory:
            if abs(x[p]) > abs(x[peaks[-1]]):
                peaks[-1] = p
            continue
        peaks.append(p)
    return np.array(peaks, dtype=int)


def beat_window(peak, next_peak):
    """Start position and step (in samples) of the beat cut at ``peak``.

    The window covers ``[peak - 150*RR/512, peak + 362*RR/512)`` where
    ``RR = next_peak - peak``, sampled at 512 equally spaced positions.
    """
    step = (next_peak - peak) / BEAT_LENGTH
    return peak - R_INDEX * step, step


def extract_beats(rec, peaks):
    """Cut every interior beat, linearly resampled to 512 samples.

    Beats whose window leaves the record are dropped.
    """
    peaks = np.asarray(peaks, dtype=int)
    if peaks.size < 3:
        raise InsufficientPeaksError(
            f"need at least 3 R-peaks to extract interior beats, got {peaks.size}"
        )
    if np.any(np.diff(peaks) <= 0):
        raise ValueError("peaks must be strictly increasing")
    x = rec.samples
    grid = np.arange(x.size)
    offsets = np.arange(BEAT_LENGTH)
    beats, used = [], []
    for p, nxt in zip(peaks[1:-1], peaks[2:]):
        start, step = beat_window(p, nxt)
        pos = start + offsets * step
        if pos[0] < 0 or pos[-1] > x.size - 1:
            continue
        beats.append(np.interp(pos, grid, x))
        used.append(p)
    beats = np.array(beats).reshape(-1, BEAT_LENGTH)
    return BeatMatrix(beats, np.array(used, dtype=int))


def mean_beat(beats, rows=None):
    """Column-wise mean over the selected beats (all beats when ``rows`` is None)."""
    B = beats.beats if isinstance(beats, BeatMatrix) else np.asarray(beats)
    selected = B if rows is None else B[np.asarray(rows, dtype=int)]
    if selected.shape[0] == 0:
        raise ValueError("cannot average an empty set of beats")
    return selected.mean(axis=0)


def load_ecg(path):
    """Read a single-lead record in the ``fs=<Hz>,lead=<name>`` text format."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        try:
            meta = dict(item.split("=", 1) for item in header.split(","))
            fs = float(meta["fs"])
        except (ValueError, KeyError):
            raise FormatError(
                f"{path}:1: expected header 'fs=<Hz>,lead=<name>', got {header!r}"
            ) from None
        values = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line.split(",")[0]))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: not a number: {line!r}") from None
    return EcgRecord(np.array(values), fs, meta.get("lead", "I").strip())


def save_ecg(rec, path):
    with open(path, "w") as fh:
        fh.write(f"fs={rec.fs:g},lead={rec.lead_name}\n")
        np.savetxt(fh, rec.samples, fmt="%.17g")


def save_beats(beats, path):
    """Write a :class:`BeatMatrix` as comma-separated 512-column rows."""
    np.savetxt(path, beats.beats, fmt="%.17g", delimiter=",")


# (offset s, amplitude mV, width s) of the P, Q, R, S and T waves
_WAVES = (
    (-0.20, 0.15, 0.025),
    (-0.03, -0.15, 0.008),
    (0.00, 1.00, 0.010),
    (0.03, -0.25, 0.009),
    (0.28, 0.30, 0.050),
)


def synthetic_ecg(duration_s=60.0, fs=500.0, heart_rate=72.0, rr_jitter=0.0,
                  amplitude_jitter=0.0, noise_sigma=0.0, wander=0.0, seed=0):
    """Sum-of-Gaussian-bumps ECG with known R-peak sample indices.

    Returns ``(record, peaks)``. ``rr_jitter`` and ``amplitude_jitter`` are
    relative standard deviations of the beat interval and of a per-beat
    amplitude factor; ``noise_sigma`` adds white noise (mV) and ``wander`` the
    amplitude of a 0.15 Hz baseline drift.
    """
    fs = check_positive_real(fs, "fs")
    rng = np.random.default_rng(check_seed(seed))
    n = int(round(duration_s * fs))
    rr = 60.0 / heart_rate
    t = np.arange(n) / fs
    x = np.zeros(n)
    peaks = []
    beat_time = 0.5
    while beat_time < duration_s - 0.5:
        idx = int(round(beat_time * fs))
        peaks.append(idx)
        gain = 1.0 + amplitude_jitter * rng.standard_normal()
        for offset, amp, width in _WAVES:
            centre = idx / fs + offset
            lo = max(0, int((centre - 5 * width) * fs))
            hi = min(n, int((centre + 5 * width) * fs) + 1)
            x[lo:hi] += gain * amp * np.exp(-0.5 * ((t[lo:hi] - centre) / width) ** 2)
        beat_time += rr * (1.0 + rr_jitter * rng.standard_normal())
    x += noise_sigma * rng.standard_normal(n)
    x += wander * np.sin(2 * np.pi * 0.15 * t + rng.uniform(0, 2 * np.pi))
    return EcgRecord(x, fs, "synthetic"), np.array(peaks, dtype=int)
