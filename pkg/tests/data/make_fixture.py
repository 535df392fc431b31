"""Regenerate the synthetic KDD99-format fixtures in this directory.

    python3 tests/data/make_fixture.py

Rows are drawn from a handful of per-attack templates resembling the real
traffic (smurf echo floods, neptune SYN floods, sweeps, password guessing,
buffer overflows), with jittered counters and rates.  ``kdd_fixture_1000.csv``
keeps a few exact duplicates, one contradictory pair and 2% label
noise; ``kdd_separable.csv``
is small and cleanly separable by ``service``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
N_ATTRS = 41

# label: (share, protocol, services, flag, src_bytes range, dst_bytes range, logged_in)
TEMPLATES = {
    "normal": (0.40, "tcp", ("http", "smtp", "ftp_data", "domain_u"), "SF", (150, 3000), (200, 20000), "1"),
    "smurf": (0.20, "icmp", ("ecr_i",), "SF", (520, 1032), (0, 0), "0"),
    "neptune": (0.15, "tcp", ("private", "telnet", "finger"), "S0", (0, 0), (0, 0), "0"),
    "back": (0.02, "tcp", ("http",), "SF", (54540, 54540), (8314, 8314), "1"),
    "ipsweep": (0.05, "icmp", ("eco_i",), "SF", (8, 18), (0, 0), "0"),
    "portsweep": (0.04, "tcp", ("private",), "REJ", (0, 0), (0, 0), "0"),
    "satan": (0.03, "tcp", ("other", "private"), "REJ", (0, 5), (0, 0), "0"),
    "guess_passwd": (0.03, "tcp", ("telnet",), "RSTO", (125, 126), (179, 180), "0"),
    "warezclient": (0.04, "tcp", ("ftp_data",), "SF", (300, 2000000), (0, 0), "1"),
    "buffer_overflow": (0.02, "tcp", ("telnet", "ftp_data"), "SF", (1500, 3000), (2000, 6000), "1"),
    "rootkit": (0.02, "tcp", ("telnet",), "SF", (800, 1600), (500, 3000), "1"),
}


def _row(rng: np.random.Generator, label: str) -> list[str]:
    _, proto, services, flag, src, dst, logged = TEMPLATES[label]
    v = [0.0] * N_ATTRS
    v[0] = float(rng.integers(0, 30)) if label in ("buffer_overflow", "rootkit", "guess_passwd") else 0.0
    v[4] = float(rng.integers(src[0], src[1] + 1))
    v[5] = float(rng.integers(dst[0], dst[1] + 1))
    if label in ("buffer_overflow", "rootkit"):
        v[9] = float(rng.integers(1, 4))
        v[13] = 1.0
        v[16] = float(rng.integers(0, 2))
    if label == "guess_passwd":
        v[10] = 1.0
    if label == "back":
        v[9] = 2.0
        v[12] = 1.0
    flood = label in ("smurf", "neptune")
    v[22] = float(rng.integers(300, 512) if flood else rng.integers(1, 20))
    v[23] = float(v[22] if label == "smurf" else rng.integers(1, 20))
    syn = label == "neptune"
    rej = label in ("portsweep", "satan")
    v[24] = v[25] = v[37] = v[38] = 1.0 if syn else 0.0
    v[26] = v[27] = v[39] = v[40] = round(float(rng.uniform(0.8, 1.0)), 2) if rej else 0.0
    v[28] = 1.0 if label in ("normal", "smurf", "back") else round(float(rng.uniform(0.0, 0.2)), 2)
    v[29] = round(1.0 - v[28], 2) if label != "normal" else 0.0
    v[31] = float(rng.integers(1, 256))
    v[32] = float(rng.integers(200, 256) if label in ("normal", "smurf") else rng.integers(1, 30))
    v[33] = round(float(v[32]) / 255.0, 2)
    v[35] = 1.0 if label in ("ipsweep", "portsweep") else round(float(rng.uniform(0, 0.1)), 2)
    fields = [_fmt(x) for x in v]
    fields[1], fields[2], fields[3] = proto, str(rng.choice(services)), flag
    fields[6], fields[11], fields[20] = "0", logged, "0"
    fields[21] = "1" if label == "warezclient" and rng.random() < 0.6 else "0"
    if label == "warezclient" and fields[21] == "0":  # blends in with normal ftp_data
        fields[4] = str(int(rng.integers(150, 3000)))
        fields[32] = str(int(rng.integers(200, 256)))
    return fields + [label + "."]


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.2f}"


def make_main(n: int = 1000, seed: int = 20240601) -> list[str]:
    rng = np.random.default_rng(seed)
    labels = list(TEMPLATES)
    shares = np.array([TEMPLATES[k][0] for k in labels])
    draws = rng.choice(len(labels), size=n - 12, p=shares / shares.sum())
    lines = [",".join(_row(rng, labels[i])) for i in draws]
    for k in rng.choice(len(lines), size=len(lines) // 50, replace=False):  # label noise
        lines[k] = lines[k].rsplit(",", 1)[0] + f",{rng.choice(labels)}."
    lines += lines[:10]  # exact duplicates
    clash = lines[0].rsplit(",", 1)[0]
    lines += [clash + ",neptune.", clash + ",neptune."]  # contradictory with row 0
    order = rng.permutation(len(lines))
    return [lines[i] for i in order]


def make_separable(seed: int = 7) -> list[str]:
    rng = np.random.default_rng(seed)
    services = {"normal": "http", "smurf": "ecr_i", "ipsweep": "eco_i", "guess_passwd": "telnet", "rootkit": "login"}
    lines = []
    for label, service in services.items():
        for _ in range(12):
            fields = _row(rng, label)
            fields[2] = service
            fields[-1] = label + "."
            lines.append(",".join(fields))
    return lines


if __name__ == "__main__":
    (HERE / "kdd_fixture_1000.csv").write_text("\n".join(make_main()) + "\n")
    (HERE / "kdd_separable.csv").write_text("\n".join(make_separable()) + "\n")
