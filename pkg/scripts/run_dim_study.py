#!/usr/bin/env python3
"""Vector-width study: accuracy and per-query energy/latency across bank
counts, on the record and language tasks."""

import argparse
from pathlib import Path

from hdcam.config import ExperimentConfig
from hdcam.datasets import SyntheticSpec
from hdcam.encoder import EncodingConfig
from hdcam.experiments import run_dim_sweep, synthesize_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="256,512,1024,2048")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/dim_study")
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]
    out = Path(args.out)

    tasks = {
        "records": ExperimentConfig(
            seed=args.seed, retrain_epochs=1,
            encoding=EncodingConfig(scheme="record"),
            synthetic=SyntheticSpec(kind="records", samples=600, classes=6, features=9, noise=0.22),
        ),
        "languages": ExperimentConfig(
            seed=args.seed, retrain_epochs=1,
            encoding=EncodingConfig(scheme="ngram", n=3),
            synthetic=SyntheticSpec(kind="languages", samples=480, languages=4, text_length=61),
        ),
    }
    for task, cfg in tasks.items():
        ds = synthesize_dataset(cfg)
        rows, _ = run_dim_sweep(cfg, ds, dims, out / f"dim_sweep_{task}.csv")
        print(task)
        for dim, acc, e_search, e_total, lat, _ in rows:
            print(f"  dim {dim:5d}: accuracy {acc:.4f}  search {e_search:8.3f} pJ/query  "
                  f"encode+search {e_total:9.3f} pJ/query  latency {lat:7.3f} ns/query")
        print(f"  wrote {out / f'dim_sweep_{task}.csv'}")


if __name__ == "__main__":
    main()
