#!/usr/bin/env python3
"""Convert public citation datasets into the text formats this repo consumes.

Two source layouts are supported, autodetected from the input directory:

1. Planetoid pickles (ind.<name>.x / y / tx / ty / allx / ally / graph /
   test.index), the layout shipped with the original GCN code. This carries
   the standard split (e.g. Cora 140 train / 500 val / 1000 test).

2. Raw McCallum files (<name>.content + <name>.cites). No canonical split
   exists in this layout, so a deterministic stratified split is built:
   20 train nodes per class, then 500 validation and 1000 test nodes.

Output files: edges.tsv, features.txt, labels.txt, split.txt.

Usage:
    python3 scripts/convert_cora.py --input /path/to/raw --output data/cora
    python3 scripts/convert_cora.py --input /path/to/raw --output data/citeseer --name citeseer

The conversion is offline: download the source files yourself, e.g. the
Planetoid pickles from github.com/kimiyoung/planetoid (data/) or the raw
archive from https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz.
"""

import argparse
import os
import pickle
import sys

import numpy as np


def parse_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--input", required=True, help="directory with the source files")
    p.add_argument("--output", required=True, help="directory to write the converted dataset")
    p.add_argument("--name", default="cora", help="dataset name (cora, citeseer, pubmed)")
    p.add_argument(
        "--no-row-normalize",
        action="store_true",
        help="keep raw feature rows instead of normalizing each row to sum 1",
    )
    return p.parse_args()


def load_planetoid(indir, name):
    import scipy.sparse as sp

    def load(part):
        path = os.path.join(indir, f"ind.{name}.{part}")
        with open(path, "rb") as f:
            return pickle.load(f, encoding="latin1")

    x, y, tx, ty, allx, ally, graph = (
        load("x"), load("y"), load("tx"), load("ty"), load("allx"), load("ally"), load("graph"),
    )
    with open(os.path.join(indir, f"ind.{name}.test.index")) as f:
        test_idx = np.array([int(line.strip()) for line in f if line.strip()])
    test_range = np.sort(test_idx)

    if name == "citeseer":
        # isolated test nodes are missing from tx/ty: pad with zero rows
        full = np.arange(test_range.min(), test_range.max() + 1)
        tx_full = sp.lil_matrix((len(full), x.shape[1]))
        tx_full[test_range - test_range.min(), :] = tx
        tx = tx_full
        ty_full = np.zeros((len(full), y.shape[1]))
        ty_full[test_range - test_range.min(), :] = ty
        ty = ty_full
        test_range = full

    features = sp.vstack((allx, tx)).tolil()
    features[test_idx, :] = features[test_range, :]
    onehot = np.vstack((ally, ty))
    onehot[test_idx, :] = onehot[test_range, :]
    labels = onehot.argmax(axis=1)

    n = features.shape[0]
    edges = set()
    for u, nbrs in graph.items():
        for v in nbrs:
            if u != v and u < n and v < n:
                edges.add((min(u, v), max(u, v)))

    train = set(range(y.shape[0]))
    test = set(test_range.tolist())
    val = set(range(y.shape[0], min(y.shape[0] + 500, n))) - test
    split = ["none"] * n
    for i in train:
        split[i] = "train"
    for i in val:
        split[i] = "val"
    for i in test:
        split[i] = "test"
    return np.asarray(features.todense()), labels, sorted(edges), split


def load_mccallum(indir, name):
    content = os.path.join(indir, f"{name}.content")
    cites = os.path.join(indir, f"{name}.cites")
    ids, rows, label_names = [], [], []
    with open(content) as f:
        for line in f:
            parts = line.strip().split()
            if not parts:
                continue
            ids.append(parts[0])
            rows.append([float(v) for v in parts[1:-1]])
            label_names.append(parts[-1])
    index = {node_id: i for i, node_id in enumerate(ids)}
    classes = sorted(set(label_names))
    class_index = {c: k for k, c in enumerate(classes)}
    labels = np.array([class_index[c] for c in label_names])
    features = np.array(rows)

    edges = set()
    skipped = 0
    with open(cites) as f:
        for line in f:
            parts = line.strip().split()
            if len(parts) != 2:
                continue
            a, b = parts
            if a not in index or b not in index or a == b:
                skipped += 1
                continue
            u, v = index[a], index[b]
            edges.add((min(u, v), max(u, v)))
    if skipped:
        print(f"note: skipped {skipped} citation lines with unknown ids", file=sys.stderr)

    # deterministic stratified split: 20 per class train, 500 val, 1000 test
    n = len(ids)
    rng = np.random.default_rng(0)
    order = rng.permutation(n)
    split = ["none"] * n
    per_class = {k: 0 for k in range(len(classes))}
    for i in order:
        c = labels[i]
        if per_class[c] < 20:
            split[i] = "train"
            per_class[c] += 1
    remaining = [i for i in order if split[i] == "none"]
    for i in remaining[:500]:
        split[i] = "val"
    for i in remaining[500:1500]:
        split[i] = "test"
    return features, labels, sorted(edges), split


def main():
    args = parse_args()
    planetoid_marker = os.path.join(args.input, f"ind.{args.name}.graph")
    if os.path.exists(planetoid_marker):
        print(f"reading Planetoid pickles from {args.input}")
        features, labels, edges, split = load_planetoid(args.input, args.name)
    else:
        print(f"reading raw content/cites files from {args.input}")
        features, labels, edges, split = load_mccallum(args.input, args.name)

    if not args.no_row_normalize:
        sums = features.sum(axis=1, keepdims=True)
        sums[sums == 0] = 1.0
        features = features / sums

    os.makedirs(args.output, exist_ok=True)
    n, q = features.shape
    with open(os.path.join(args.output, "features.txt"), "w") as f:
        f.write(f"{n} {q}\n")
        for row in features:
            f.write(" ".join(repr(float(v)) for v in row) + "\n")
    with open(os.path.join(args.output, "labels.txt"), "w") as f:
        for v in labels:
            f.write(f"{int(v)}\n")
    with open(os.path.join(args.output, "edges.tsv"), "w") as f:
        for u, v in edges:
            f.write(f"{u}\t{v}\n")
    with open(os.path.join(args.output, "split.txt"), "w") as f:
        for tag in split:
            f.write(tag + "\n")
    counts = {t: split.count(t) for t in ("train", "val", "test", "none")}
    print(f"wrote {args.output}: n={n}, q={q}, edges={len(edges)}, split={counts}")


if __name__ == "__main__":
    main()
