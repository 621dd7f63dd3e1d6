"""Smoke test for the imfogram extension module."""

import math

import imfogram

RATE = 2000.0


def main():
    s = imfogram.gen_chirp_pair(2000, RATE)
    assert abs(s[0] - 2.0) < 1e-12

    run = imfogram.decompose(s, RATE, max_imfs=2)
    assert len(run["imfs"]) == 2, run["stop_reason"]
    recon = [sum(parts) for parts in zip(*run["imfs"], run["trend"])]
    assert max(abs(a - b) for a, b in zip(recon, s)) < 1e-10

    report = imfogram.check_conservation(s, RATE, run["imfs"] + [run["trend"]])
    assert report["conserves"], report["summary"]
    assert report["relative_error"] <= 1e-10

    raw = imfogram.decompose(s, RATE, filter_mode="raw")
    raw_report = imfogram.check_conservation(s, RATE, raw["imfs"] + [raw["trend"]])
    assert raw_report["violations"], raw_report["summary"]

    tone = [0.7 * math.cos(2 * math.pi * 37 * j / 4096 + 0.4) for j in range(4096)]
    single = imfogram.decompose(tone, 4096.0)
    a = imfogram.imfogram(single["imfs"], 4096.0, 4096)
    p = imfogram.spectrogram(tone, 4096.0, 4096)
    assert len(a["values"]) == len(p["values"]) == 2049
    assert abs(a["values"][37][0] - p["values"][37][0]) <= 0.02 * 0.7

    assert imfogram.gen_noisy_triple(64, 64.0, seed=3) == imfogram.gen_noisy_triple(64, 64.0, seed=3)
    assert len(imfogram.gen_duffing_velocity(128, 1.0)) == 128

    try:
        imfogram.decompose(s, RATE, chi=3.0)
    except ValueError as e:
        assert "chi" in str(e)
    else:
        raise AssertionError("bad chi accepted")

    print("smoke test passed:", report["summary"])


if __name__ == "__main__":
    main()
