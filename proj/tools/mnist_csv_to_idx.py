#!/usr/bin/env python3
"""Convert an MNIST CSV (784 pixel columns then a label, one image per row)
into gzipped IDX image and label files.

Rows are interleaved by class (0,1,...,9,0,1,...) so that any leading
block of the output is class-balanced.

usage: mnist_csv_to_idx.py SOURCE.csv[.gz] OUT_PREFIX
"""
import argparse
import csv
import gzip
import io
import struct
import zipfile


def read_rows(path, member=None):
    if member:
        with zipfile.ZipFile(path) as zf:
            raw = zf.read(member)
        if member.endswith(".gz"):
            raw = gzip.decompress(raw)
        text = io.StringIO(raw.decode())
    elif path.endswith(".gz"):
        text = io.StringIO(gzip.open(path).read().decode())
    else:
        text = open(path)
    rows = []
    for rec in csv.reader(text):
        vals = [int(float(v)) for v in rec]
        rows.append((vals[:784], vals[784]))
    return rows


def interleave(rows):
    by_class = {}
    for pixels, label in rows:
        by_class.setdefault(label, []).append(pixels)
    out = []
    labels = sorted(by_class)
    depth = max(len(v) for v in by_class.values())
    for i in range(depth):
        for c in labels:
            if i < len(by_class[c]):
                out.append((by_class[c][i], c))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source", help="CSV file, or a wheel/zip when --member is given")
    ap.add_argument("prefix")
    ap.add_argument("--member", help="path of the CSV inside a zip archive")
    args = ap.parse_args()

    rows = interleave(read_rows(args.source, args.member))
    n = len(rows)
    images = bytearray(struct.pack(">IIII", 0x803, n, 28, 28))
    labels = bytearray(struct.pack(">II", 0x801, n))
    for pixels, label in rows:
        images.extend(bytes(pixels))
        labels.append(label)
    with gzip.GzipFile(args.prefix + "-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(images)
    with gzip.GzipFile(args.prefix + "-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(labels)
    print(f"wrote {n} images")


if __name__ == "__main__":
    main()
