#!/usr/bin/env python3
"""Generate binary test fixtures: the golden EDF file used by the reader
tests and the seed corpora for the fuzz targets.

This writer is deliberately independent of the Rust code so the golden
values it prints can be frozen into the tests as an external reference.

Run from the repo root:  python3 scripts/make_fixtures.py
"""

import os
import struct

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def field(value, width):
    s = str(value)
    assert len(s) <= width, (value, width)
    return s.ljust(width).encode("ascii")


def edf_bytes(signals, num_records, record_duration):
    """signals: list of dicts with label, phys_min/max, dig_min/max,
    samples_per_record, data (list of ints, len = num_records * spr)."""
    ns = len(signals)
    header_bytes = 256 + 256 * ns
    out = bytearray()
    out += field("0", 8)
    out += field("golden fixture patient", 80)
    out += field("golden fixture recording", 80)
    out += field("01.01.20", 8)
    out += field("00.00.00", 8)
    out += field(header_bytes, 8)
    out += field("", 44)
    out += field(num_records, 8)
    out += field(record_duration, 8)
    out += field(ns, 4)
    for key, width in (
        ("label", 16),
        ("transducer", 80),
        ("dim", 8),
        ("phys_min", 8),
        ("phys_max", 8),
        ("dig_min", 8),
        ("dig_max", 8),
        ("prefilter", 80),
        ("samples_per_record", 8),
        ("reserved", 32),
    ):
        for sig in signals:
            out += field(sig.get(key, ""), width)
    for rec in range(num_records):
        for sig in signals:
            spr = sig["samples_per_record"]
            chunk = sig["data"][rec * spr : (rec + 1) * spr]
            out += struct.pack("<%dh" % spr, *chunk)
    return bytes(out)


def physical(d, dmin, dmax, pmin, pmax):
    scale = (pmax - pmin) / (dmax - dmin)
    return (d - dmin) * scale + pmin


def make_golden():
    n = 1000
    ramp = {
        "label": "ramp",
        "dim": "uV",
        "phys_min": -32768,
        "phys_max": 32767,
        "dig_min": -32768,
        "dig_max": 32767,
        "samples_per_record": 100,
        "data": list(range(n)),
    }
    scaled = {
        "label": "scaled",
        "dim": "mV",
        "phys_min": -1,
        "phys_max": 1,
        "dig_min": -32768,
        "dig_max": 32767,
        "samples_per_record": 100,
        "data": [32 * k - 16000 for k in range(n)],
    }
    blob = edf_bytes([ramp, scaled], num_records=10, record_duration=1)
    path = os.path.join(ROOT, "crates", "sobi", "tests", "data", "golden_ramp.edf")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(blob)
    print(f"wrote {path} ({len(blob)} bytes)")
    print("golden expectations (index: value-as-repr):")
    for idx in (0, 1, 2, 499, 998, 999):
        v0 = physical(ramp["data"][idx], -32768.0, 32767.0, -32768.0, 32767.0)
        v1 = physical(scaled["data"][idx], -32768.0, 32767.0, -1.0, 1.0)
        print(f"  ramp[{idx}] = {v0!r}   scaled[{idx}] = {v1!r}")


def make_corpus():
    corpus = os.path.join(ROOT, "crates", "sobi", "fuzz", "corpus")

    d = os.path.join(corpus, "read_csv")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "labeled.csv"), "wb") as f:
        f.write(b"left,right\n1.0,2.0\n3.5,-4.25\n0.125,9e3\n")
    with open(os.path.join(d, "bare.csv"), "wb") as f:
        f.write(b"1,2,3\n4,5,6\n")

    d = os.path.join(corpus, "read_bin")
    os.makedirs(d, exist_ok=True)
    payload = struct.pack("<4sII", b"BSS1", 2, 3) + struct.pack(
        "<6d", 1.0, 2.0, 3.0, -4.0, 5.5, 6.25
    )
    with open(os.path.join(d, "two_by_three.bss1"), "wb") as f:
        f.write(payload)

    d = os.path.join(corpus, "read_edf")
    os.makedirs(d, exist_ok=True)
    tiny = {
        "label": "c1",
        "dim": "uV",
        "phys_min": -100,
        "phys_max": 100,
        "dig_min": -2048,
        "dig_max": 2047,
        "samples_per_record": 4,
        "data": [0, 100, -100, 2047, -2048, 7, -7, 1],
    }
    blob = edf_bytes([tiny], num_records=2, record_duration=1)
    with open(os.path.join(d, "tiny.edf"), "wb") as f:
        f.write(blob)
    print(f"wrote corpus seeds under {corpus}")


if __name__ == "__main__":
    make_golden()
    make_corpus()
