#!/usr/bin/env python3
# Copyright 2026 The emomv-eval Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts a libsvm epsilon-SVR BRISQUE model into the emomv JSON model format.

The source model stores AGGD features as (alpha, eta, sigma_l^2, sigma_r^2);
the emomv feature layout is (eta, alpha, sigma_l^2, sigma_r^2), so both the
scaling bounds and the support vector columns are permuted here.

Usage:
  convert_libsvm_model.py SVM_TXT RANGES OUT_JSON [--version STR]

RANGES is either a pickle with "min_"/"max_" lists (image-quality package) or
a two-line text file with 36 whitespace-separated minima then maxima.
"""

import argparse
import json
import pickle

NUM_FEATURES = 36


def load_libsvm(path):
    with open(path) as f:
        lines = [l.rstrip("\n") for l in f]
    sv_start = lines.index("SV")
    header = dict(l.split(" ", 1) for l in lines[:sv_start])
    if header.get("svm_type") != "epsilon_svr" or header.get("kernel_type") != "rbf":
        raise SystemExit("expected an epsilon_svr model with an rbf kernel")
    coefs, svs = [], []
    for line in lines[sv_start + 1:]:
        if not line.strip():
            continue
        tokens = line.split()
        row = [0.0] * NUM_FEATURES
        for kv in tokens[1:]:
            k, v = kv.split(":")
            row[int(k) - 1] = float(v)
        coefs.append(float(tokens[0]))
        svs.append(row)
    return float(header["gamma"]), -float(header["rho"]), coefs, svs


def load_ranges(path):
    if path.endswith(".pickle") or path.endswith(".pkl"):
        with open(path, "rb") as f:
            d = pickle.load(f)
        return list(d["min_"]), list(d["max_"])
    with open(path) as f:
        rows = [l.split() for l in f if l.strip()]
    return [float(x) for x in rows[0]], [float(x) for x in rows[1]]


def permutation():
    perm = list(range(NUM_FEATURES))
    for scale in (0, 18):
        for orient in range(4):
            base = scale + 2 + 4 * orient
            perm[base], perm[base + 1] = base + 1, base
    return perm


def feature_names():
    names = []
    for scale in (1, 2):
        names += [f"s{scale}.mscn.alpha", f"s{scale}.mscn.sigma_sq"]
        for orient in ("h", "v", "d1", "d2"):
            names += [f"s{scale}.{orient}.{p}" for p in ("eta", "alpha", "sigma_l_sq", "sigma_r_sq")]
    return names


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("svm")
    ap.add_argument("ranges")
    ap.add_argument("out")
    ap.add_argument("--version", default="live-1")
    args = ap.parse_args()

    gamma, intercept, coefs, svs = load_libsvm(args.svm)
    fmin, fmax = load_ranges(args.ranges)
    if len(fmin) != NUM_FEATURES or len(fmax) != NUM_FEATURES:
        raise SystemExit("ranges must hold 36 minima and 36 maxima")
    perm = permutation()
    doc = {
        "format": "emomv-brisque-svr",
        "version": args.version,
        "feature_names": feature_names(),
        "feature_min": [fmin[i] for i in perm],
        "feature_max": [fmax[i] for i in perm],
        "rbf_gamma": gamma,
        "intercept": intercept,
        "dual_coefs": coefs,
        "support_vectors": [[row[i] for i in perm] for row in svs],
    }
    with open(args.out, "w") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")


if __name__ == "__main__":
    main()
