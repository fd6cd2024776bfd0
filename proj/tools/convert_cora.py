#!/usr/bin/env python3
"""Convert the cora citation dataset to the CSV layout this toolkit ingests.

Two input formats are supported:

1. The classic distribution (``--content cora.content --cites cora.cites``):
   one line per paper with <id> <1433 binary features> <class>, plus a list
   of ``<cited> <citing>`` pairs.

2. The planetoid pickles (``--planetoid-dir DIR``, files ``ind.cora.*``),
   which additionally carry the fixed 140/500/1000 train/valid/test split
   written to splits.csv.

Output: <out>/features.csv, labels.csv, edges.csv and (planetoid only)
splits.csv.
"""

import argparse
import os
import pickle
import sys


def write_matrix(path, rows):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(",".join(f"{v:g}" for v in row) + "\n")


def convert_content(content_path, cites_path, out_dir):
    ids, features, labels = [], [], []
    label_names = {}
    with open(content_path) as fh:
        for line in fh:
            parts = line.strip().split()
            if not parts:
                continue
            ids.append(parts[0])
            features.append([float(v) for v in parts[1:-1]])
            labels.append(label_names.setdefault(parts[-1], len(label_names)))
    index = {pid: i for i, pid in enumerate(ids)}

    edges = set()
    skipped = 0
    with open(cites_path) as fh:
        for line in fh:
            parts = line.strip().split()
            if len(parts) != 2:
                continue
            if parts[0] not in index or parts[1] not in index:
                skipped += 1
                continue
            a, b = index[parts[0]], index[parts[1]]
            if a != b:
                edges.add((min(a, b), max(a, b)))
    if skipped:
        print(f"warning: {skipped} citation(s) referenced unknown ids", file=sys.stderr)

    write_matrix(os.path.join(out_dir, "features.csv"), features)
    with open(os.path.join(out_dir, "labels.csv"), "w") as fh:
        fh.write("\n".join(str(v) for v in labels) + "\n")
    with open(os.path.join(out_dir, "edges.csv"), "w") as fh:
        for a, b in sorted(edges):
            fh.write(f"{a},{b},1\n")
    print(f"wrote {len(ids)} nodes, {len(edges)} edges, {len(label_names)} classes -> {out_dir}")


def convert_planetoid(planetoid_dir, out_dir):
    import numpy as np
    import scipy.sparse as sp

    def load(name):
        with open(os.path.join(planetoid_dir, f"ind.cora.{name}"), "rb") as fh:
            return pickle.load(fh, encoding="latin1")

    x, y, tx, ty, allx, ally = (load(n) for n in ("x", "y", "tx", "ty", "allx", "ally"))
    graph = load("graph")
    with open(os.path.join(planetoid_dir, "ind.cora.test.index")) as fh:
        test_idx = [int(line.strip()) for line in fh if line.strip()]

    test_range = np.sort(test_idx)
    features = sp.vstack((allx, tx)).tolil()
    features[test_idx, :] = features[test_range, :]
    labels_onehot = np.vstack((ally, ty))
    labels_onehot[test_idx, :] = labels_onehot[test_range, :]
    labels = labels_onehot.argmax(axis=1)

    n = features.shape[0]
    edges = set()
    for a, nbrs in graph.items():
        for b in nbrs:
            if a != b and a < n and b < n:
                edges.add((min(a, b), max(a, b)))

    write_matrix(os.path.join(out_dir, "features.csv"), features.toarray())
    with open(os.path.join(out_dir, "labels.csv"), "w") as fh:
        fh.write("\n".join(str(int(v)) for v in labels) + "\n")
    with open(os.path.join(out_dir, "edges.csv"), "w") as fh:
        for a, b in sorted(edges):
            fh.write(f"{a},{b},1\n")
    with open(os.path.join(out_dir, "splits.csv"), "w") as fh:
        for i in range(x.shape[0]):
            fh.write(f"{i},train\n")
        for i in range(x.shape[0], x.shape[0] + 500):
            fh.write(f"{i},valid\n")
        for i in test_idx:
            fh.write(f"{i},test\n")
    print(f"wrote {n} nodes, {len(edges)} edges with the fixed split -> {out_dir}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--content", help="cora.content path")
    parser.add_argument("--cites", help="cora.cites path")
    parser.add_argument("--planetoid-dir", help="directory holding ind.cora.*")
    parser.add_argument("--out", required=True, help="output dataset directory")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    if args.planetoid_dir:
        convert_planetoid(args.planetoid_dir, args.out)
    elif args.content and args.cites:
        convert_content(args.content, args.cites, args.out)
    else:
        parser.error("pass either --planetoid-dir or both --content and --cites")


if __name__ == "__main__":
    main()
