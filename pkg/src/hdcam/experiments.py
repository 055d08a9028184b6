"""Experiment runners: classification, clustering, dimension sweeps, curves.

Every runner derives named child seeds from the master seed, charges phase
ledgers (training, query encoding, query search) against the cost table, and
can emit a CSV whose header comment block records the fully resolved
configuration and all derived seeds, so identical configs give identical
output bytes.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cam
from .cost import CostLedger, ratios_vs_cmos, report
from .datasets import make_hv_blobs, make_language_corpus, make_record_blobs, purity, train_test_indices
from .encoder import build_item_memory, build_level_memory, encode_ngram, encode_record
from .errors import ConfigError
from .hvcore import DEFAULT_TIE_BREAK_SEED, Rng, binarize, derive_seed
from .learner import EncodedSample, SimilarityBackend, cluster, predict, retrain, train

SEED_STREAMS = ("split", "memories", "encode", "lta", "cluster", "dataset")


def child_seeds(master):
    return {name: derive_seed(master, name) for name in SEED_STREAMS}


_PROFILE_CACHE = {}


def resolve_profile(cfg):
    """Uniform 1 V profile, or the calibrated one (memoized per params)."""
    if cfg.profile == "uniform":
        return cam.VoltageProfile.uniform(1.0)
    p = cfg.analog
    key = (p.r_segment, p.g_cell, p.v_th, p.gamma, p.i_floor, p.i_cell_nominal)
    if key not in _PROFILE_CACHE:
        _PROFILE_CACHE[key] = cam.calibrate_profile(p)
    return _PROFILE_CACHE[key]


def synthesize_dataset(cfg):
    """Built-in generator selected by the [synthetic] config section."""
    rng = Rng(child_seeds(cfg.seed)["dataset"])
    spec = cfg.synthetic
    if spec.kind == "records":
        return make_record_blobs(spec, rng)
    if spec.kind == "languages":
        return make_language_corpus(spec, rng)
    return make_hv_blobs(
        spec.classes, spec.blob_points, cfg.dim, rng, spec.blob_max_flip_fraction
    )


@dataclass
class EncodingContext:
    """Built memories plus whatever the dataset kind needs at encode time."""

    item_memory: object
    level_memory: object = None
    vocab: dict = None
    feature_min: np.ndarray = None
    feature_range: np.ndarray = None


def build_encoding_context(dataset, cfg, seed):
    rng = Rng(seed)
    enc = cfg.encoding
    if dataset.kind == "text_corpus":
        chars = sorted({c for text in dataset.samples for c in text})
        im = build_item_memory(len(chars), cfg.dim, rng)
        return EncodingContext(item_memory=im, vocab={c: i for i, c in enumerate(chars)})
    if dataset.kind == "feature_csv":
        n_features = len(dataset.samples[0])
        im = build_item_memory(n_features, cfg.dim, rng)
        lm = build_level_memory(enc.levels, cfg.dim, rng, 0.0, 1.0)
        fmin = np.asarray(dataset.metadata["feature_min"], dtype=np.float64)
        fmax = np.asarray(dataset.metadata["feature_max"], dtype=np.float64)
        frange = np.where(fmax > fmin, fmax - fmin, 1.0)
        return EncodingContext(
            item_memory=im, level_memory=lm, feature_min=fmin, feature_range=frange
        )
    raise ConfigError(f"cannot encode dataset kind {dataset.kind!r}")


def encode_subset(dataset, indices, ctx, cfg, rng_encode, ledger=None,
                  tie_break_seed=DEFAULT_TIE_BREAK_SEED):
    """EncodedSample list (accumulator + binarized bits) for the given rows."""
    enc = cfg.encoding
    out = []
    for i in indices:
        if dataset.kind == "text_corpus":
            seq = [ctx.vocab[c] for c in dataset.samples[i]]
            acc = encode_ngram(seq, enc.n, ctx.item_memory, enc, rng=rng_encode, ledger=ledger)
        else:
            x = (np.asarray(dataset.samples[i]) - ctx.feature_min) / ctx.feature_range
            acc = encode_record(x, ctx.item_memory, ctx.level_memory, ledger=ledger)
        label = dataset.labels[i] if dataset.labels is not None else None
        out.append(EncodedSample(bits=binarize(acc, tie_break_seed), label=label, acc=acc))
    return out


def _ideal_backend(mode):
    return SimilarityBackend(kind="ideal_dot" if mode == "multibit" else "ideal_hamming")


def inference_backend(cfg, cm=None):
    """Backend selected by the config; analog variants get profile, sensing, rng."""
    if cfg.backend == "ideal":
        return _ideal_backend(cfg.mode), None
    profile = resolve_profile(cfg)
    backend = SimilarityBackend(
        kind="analog_cam",
        profile=profile,
        params=cfg.analog,
        sensing=cfg.sensing,
        rng=Rng(child_seeds(cfg.seed)["lta"]),
        layout=cam.load_rows(cm) if cm is not None else None,
    )
    return backend, profile


def write_csv(path, meta, fieldnames, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for k, v in meta.items():
            f.write(f"# {k} = {v}\n")
        w = csv.writer(f)
        w.writerow(fieldnames)
        w.writerows(rows)


@dataclass
class ClassifyResult:
    accuracy: float
    n_train: int
    n_test: int
    predictions: list
    reports: dict
    profile_levels: tuple
    meta: dict


def run_classify(cfg, dataset, out_path=None):
    """Train (optionally retrain), then evaluate on a held-out seeded split."""
    if dataset.labels is None:
        raise ConfigError("classification needs a labeled dataset")
    seeds = child_seeds(cfg.seed)
    table = cfg.cost_table()
    ledgers = {
        name: CostLedger(cfg.dim, table) for name in ("train", "infer_encode", "infer_search")
    }
    train_idx, test_idx = train_test_indices(dataset.n, cfg.test_fraction, seeds["split"])
    ctx = build_encoding_context(dataset, cfg, seeds["memories"])
    rng_encode = Rng(seeds["encode"])
    train_samples = encode_subset(dataset, train_idx, ctx, cfg, rng_encode, ledgers["train"])
    test_samples = encode_subset(dataset, test_idx, ctx, cfg, rng_encode, ledgers["infer_encode"])

    cm = train(train_samples, mode=cfg.mode, ledger=ledgers["train"])
    if cfg.retrain_epochs:
        # Retraining always runs against the ideal backend of the configured
        # mode; the configured (possibly analog) backend applies to inference.
        cm = retrain(cm, train_samples, cfg.retrain_epochs, _ideal_backend(cfg.mode),
                     ledger=ledgers["train"])

    backend, profile = inference_backend(cfg, cm)
    predictions = []
    correct = 0
    for idx, sample in zip(test_idx, test_samples):
        query = sample.acc if backend.kind == "ideal_dot" else sample.bits
        predicted, decision = predict(
            query, cm, backend, ledger=ledgers["infer_search"], return_decision=True
        )
        ok = predicted == sample.label
        correct += int(ok)
        flags = decision.ambiguous_flags if decision is not None else 0
        predictions.append((int(idx), sample.label, predicted, flags))
    accuracy = correct / len(test_samples)

    reports = {name: report(ledger) for name, ledger in ledgers.items()}
    reports["total"] = report(
        ledgers["train"].merge(ledgers["infer_encode"]).merge(ledgers["infer_search"])
    )
    meta = cfg.meta()
    meta.update({f"seeds.{k}": v for k, v in seeds.items()})
    meta["accuracy"] = accuracy
    meta["n_train"] = len(train_samples)
    meta["n_test"] = len(test_samples)
    if profile is not None:
        meta["profile.levels"] = ",".join(f"{v:.2f}" for v in profile.levels)
    for name, rep in reports.items():
        meta[f"cost.{name}.hydra_energy_pj"] = rep.hydra_energy_pj
        meta[f"cost.{name}.hydra_latency_ns"] = rep.hydra_latency_ns
    result = ClassifyResult(
        accuracy=accuracy,
        n_train=len(train_samples),
        n_test=len(test_samples),
        predictions=predictions,
        reports=reports,
        profile_levels=profile.levels if profile is not None else None,
        meta=meta,
    )
    if out_path is not None:
        rows = [(i, t, p, int(t == p), f) for i, t, p, f in predictions]
        write_csv(
            out_path,
            meta,
            ("sample_index", "true_label", "predicted_label", "correct", "lta_ambiguous_flags"),
            rows,
        )
    return result


@dataclass
class ClusterResult:
    state: object
    purity: float
    converged: bool
    reports: dict
    meta: dict


def run_cluster(cfg, dataset, out_path=None):
    """Cluster encoded points; labels, when present, only score purity."""
    seeds = child_seeds(cfg.seed)
    table = cfg.cost_table()
    ledgers = {name: CostLedger(cfg.dim, table) for name in ("encode", "cluster")}
    if dataset.kind == "synthetic_blobs":
        points = list(dataset.samples)
    else:
        ctx = build_encoding_context(dataset, cfg, seeds["memories"])
        encoded = encode_subset(
            dataset, range(dataset.n), ctx, cfg, Rng(seeds["encode"]), ledgers["encode"]
        )
        points = [s.bits for s in encoded]
    if cfg.backend == "ideal":
        backend = SimilarityBackend(kind="ideal_hamming")
        profile = None
    else:
        profile = resolve_profile(cfg)
        backend = SimilarityBackend(
            kind="analog_cam",
            profile=profile,
            params=cfg.analog,
            sensing=cfg.sensing,
            rng=Rng(seeds["lta"]),
        )
    state = cluster(
        points,
        cfg.cluster_k,
        cfg.cluster_threshold,
        cfg.cluster_max_epochs,
        Rng(seeds["cluster"]),
        backend,
        ledger=ledgers["cluster"],
    )
    converged = state.epoch < cfg.cluster_max_epochs
    score = purity(state.assignments, dataset.labels) if dataset.labels is not None else float("nan")
    reports = {name: report(ledger) for name, ledger in ledgers.items()}
    reports["total"] = report(ledgers["encode"].merge(ledgers["cluster"]))
    meta = cfg.meta()
    meta.update({f"seeds.{k}": v for k, v in seeds.items()})
    meta["epochs"] = state.epoch
    meta["converged"] = converged
    meta["purity"] = score
    meta["objective_history"] = ";".join(str(v) for v in state.objective_history)
    if profile is not None:
        meta["profile.levels"] = ",".join(f"{v:.2f}" for v in profile.levels)
    for name, rep in reports.items():
        meta[f"cost.{name}.hydra_energy_pj"] = rep.hydra_energy_pj
        meta[f"cost.{name}.hydra_latency_ns"] = rep.hydra_latency_ns
    result = ClusterResult(state=state, purity=score, converged=converged, reports=reports, meta=meta)
    if out_path is not None:
        labels = dataset.labels if dataset.labels is not None else [""] * dataset.n
        rows = [(i, labels[i], int(state.assignments[i])) for i in range(len(points))]
        write_csv(out_path, meta, ("point_index", "label", "cluster"), rows)
    return result


def run_dim_sweep(cfg, dataset, dims, out_path=None):
    """Classification accuracy and per-query cost across vector widths."""
    rows = []
    results = {}
    for dim in dims:
        sub = cfg.with_overrides(dim=dim)
        res = run_classify(sub, dataset)
        results[dim] = res
        search_rep = res.reports["infer_search"]
        encode_rep = res.reports["infer_encode"]
        rows.append(
            (
                dim,
                res.accuracy,
                search_rep.hydra_energy_pj / res.n_test,
                (search_rep.hydra_energy_pj + encode_rep.hydra_energy_pj) / res.n_test,
                search_rep.hydra_latency_ns / res.n_test,
                search_rep.cmos_net_energy_pj / res.n_test,
            )
        )
    meta = cfg.meta()
    meta["dims"] = ",".join(str(d) for d in dims)
    if out_path is not None:
        write_csv(
            out_path,
            meta,
            (
                "dim",
                "accuracy",
                "energy_per_query_search_pj",
                "energy_per_query_total_pj",
                "latency_per_query_search_ns",
                "cmos_net_energy_per_query_pj",
            ),
            rows,
        )
    return rows, results


def run_transfer_curve(cfg, out_path=None, placement_rule="random-seeded"):
    """Current-vs-distance curves for the uniform and calibrated profiles."""
    params = cfg.analog
    uniform = cam.VoltageProfile.uniform(1.0)
    calibrated = resolve_profile(cfg.with_overrides(profile="calibrated"))
    curves = {"uniform": cam.transfer_curve(uniform, params, placement_rule),
              "calibrated": cam.transfer_curve(calibrated, params, placement_rule)}
    dev_u = cam.max_line_deviation(curves["uniform"])
    dev_c = cam.max_line_deviation(curves["calibrated"])
    meta = cfg.meta()
    meta["placement_rule"] = placement_rule
    meta["profile.calibrated.levels"] = ",".join(f"{v:.2f}" for v in calibrated.levels)
    meta["max_deviation_uniform_a"] = dev_u
    meta["max_deviation_calibrated_a"] = dev_c
    meta["deviation_improvement"] = dev_u / dev_c if dev_c > 0 else float("inf")
    rows = [(h, c, pid) for pid in ("uniform", "calibrated") for h, c in curves[pid]]
    if out_path is not None:
        write_csv(out_path, meta, ("hamming", "current_amperes", "profile_id"), rows)
    return curves, meta


def run_cost_report(cfg, out_path=None):
    """Constants and CMOS-vs-in-array ratios of the active cost table."""
    table = cfg.cost_table()
    ratios = ratios_vs_cmos(table)
    rows = []
    for op, c in table.ops.items():
        rows.append(
            (
                op,
                c.hydra_latency_ns,
                c.hydra_energy_pj,
                c.cmos_cycles,
                c.cmos_energy_pj,
                c.cmos_net_energy_pj,
                round(ratios[op]["energy_ratio"], 4),
                round(ratios[op]["net_energy_ratio"], 4),
            )
        )
    meta = {
        "mem_read_energy_nj": table.mem_read_energy_nj,
        "cmos_cycle_ns": table.cmos_cycle_ns,
        "reference_dim": table.reference_dim,
        "cost_table_path": cfg.cost_table_path or "",
    }
    if out_path is not None:
        write_csv(
            out_path,
            meta,
            (
                "op",
                "hydra_latency_ns",
                "hydra_energy_pj",
                "cmos_cycles",
                "cmos_energy_pj",
                "cmos_net_energy_pj",
                "energy_ratio",
                "net_energy_ratio",
            ),
            rows,
        )
    return rows, meta
