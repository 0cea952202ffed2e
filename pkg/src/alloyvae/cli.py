"""Command-line entry point: train, eval, reconstruct, invert, grid, shap,
latent-map, baseline and serve.

Every command validates inputs, writes outputs atomically (temp + rename)
and is reproducible: identical flags against an identical checkpoint produce
hash-identical files.  Exit codes: 0 success, 2 usage error, 3 data error,
4 numeric failure.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import data as data_mod
from . import design, explain
from .data import DEFAULT_SPLIT_SIZES, DatasetError
from .elements import CompositionError, format_standard, parse_formula, to_vector
from .featurize import features_matrix
from .nncore import NonFiniteValueError
from .dvae import (
    DvaeConfig,
    DvaeModel,
    NonFiniteLossError,
    dataset_sha256,
    load_model,
    save_model,
    train as train_model,
    train_supervised_baseline,
)
from .dvae.checkpoint import CheckpointError, atomic_write_text


def cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DatasetError, CompositionError, CheckpointError, OSError) as exc:
            click.echo(f"error[data]: {exc}", err=True)
            sys.exit(3)
        except (NonFiniteLossError, NonFiniteValueError, FloatingPointError) as exc:
            click.echo(f"error[numeric]: {exc}", err=True)
            sys.exit(4)

    return wrapper


def parse_range(text: str) -> np.ndarray:
    """start:end:count, endpoints inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise click.UsageError(f"range must be start:end:count, got {text!r}")
    try:
        start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise click.UsageError(f"bad range {text!r}: {exc}") from exc
    if count < 2:
        raise click.UsageError("range count must be >= 2")
    return np.linspace(start, end, count)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t != ""]
    except ValueError as exc:
        raise click.UsageError(f"bad integer list {text!r}") from exc


def _load_records(dataset: str | None):
    path = Path(dataset) if dataset else data_mod.bundled_dataset_path()
    return data_mod.load_dataset(path)


def _splits_for_model(model: DvaeModel, records):
    sizes = model.split_sizes or DEFAULT_SPLIT_SIZES
    if model.dataset_sha256 and model.dataset_sha256 != dataset_sha256(records):
        click.echo("warning: dataset differs from the one the checkpoint was trained on",
                   err=True)
    return data_mod.split(records, sizes=tuple(sizes), seed=model.config.seed)


def _split_indices(splits, name: str):
    if name not in ("labelled", "unlabelled", "validation", "test"):
        raise click.UsageError(
            f"unknown split {name!r} (labelled, unlabelled, validation, test)"
        )
    return getattr(splits, name)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


@click.group()
def main():
    """Semi-supervised disentangled VAE for single-phase alloy design."""


def _train_one(args):
    seed, dataset, sizes, overrides = args
    records = _load_records(dataset)
    splits = data_mod.split(records, sizes=sizes, seed=seed)
    config = DvaeConfig(seed=seed, **overrides)
    return seed, train_model(config, records, splits), splits


@main.command("train")
@click.option("--dataset", type=click.Path(exists=True), default=None,
              help="formula,label CSV (default: bundled dataset)")
@click.option("--seeds", default="0,1,2,3,4", show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--sizes", default=None,
              help="labelled,unlabelled,validation,test (default 864,296,75,138)")
@click.option("--gamma", type=float, default=10.0, show_default=True)
@click.option("--latent-dim", type=int, default=2, show_default=True)
@click.option("--epochs", type=int, default=20000, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--lr", type=float, default=1e-4, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="parallel training processes")
@cli_errors
def cmd_train(dataset, seeds, out_dir, sizes, gamma, latent_dim, epochs, batch_size,
              lr, jobs):
    """Train one model per seed; write checkpoints, training logs and a
    metrics summary."""
    seed_list = parse_int_list(seeds)
    if not seed_list:
        raise click.UsageError("need at least one seed")
    size_tuple = tuple(parse_int_list(sizes)) if sizes else DEFAULT_SPLIT_SIZES
    if len(size_tuple) != 4:
        raise click.UsageError("--sizes needs four comma-separated integers")
    overrides = dict(gamma=gamma, latent_dim=latent_dim, max_epochs=epochs,
                     batch_size=batch_size, lr0=lr)
    click.echo(f"split sizes: {size_tuple[0]}/{size_tuple[1]}/{size_tuple[2]}/{size_tuple[3]}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs_args = [(s, dataset, size_tuple, overrides) for s in seed_list]
    if jobs > 1 and len(seed_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_train_one, jobs_args))
    else:
        results = [_train_one(a) for a in jobs_args]

    per_seed = {}
    for seed, res, splits in results:
        ckpt = out / f"checkpoint_seed{seed}.json"
        save_model(res.model, ckpt)
        atomic_write_text(out / f"trainlog_seed{seed}.csv", res.log.to_csv())
        atomic_write_text(out / f"splits_seed{seed}.json", splits.to_json() + "\n")
        per_seed[seed] = res.model.metrics
        m = res.model.metrics
        click.echo(
            f"seed {seed}: epochs={m['epochs_run']} best={m['best_epoch']} "
            f"val_acc={m['validation']['accuracy']:.4f} test_acc={m['test']['accuracy']:.4f} "
            f"test_auc={m['test']['auc']:.4f} -> {ckpt}"
        )

    summary = {"seeds": seed_list, "split_sizes": list(size_tuple), "per_seed": per_seed}
    for part in ("train", "validation", "test"):
        for metric in ("accuracy", "auc"):
            vals = [per_seed[s][part][metric] for s in seed_list]
            summary[f"{part}_{metric}_mean"] = statistics.fmean(vals)
            summary[f"{part}_{metric}_std"] = statistics.pstdev(vals) if len(vals) > 1 else 0.0
    atomic_write_text(out / "metrics_summary.json", _dump_json(summary))
    click.echo(
        "test accuracy {:.3f} +/- {:.3f}, test AUC {:.3f} +/- {:.3f}".format(
            summary["test_accuracy_mean"], summary["test_accuracy_std"],
            summary["test_auc_mean"], summary["test_auc_std"])
    )


@main.command("eval")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--split", "split_name", default="test", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write the ROC curve CSV here")
@cli_errors
def cmd_eval(checkpoint, dataset, split_name, out_path):
    """Accuracy and AUC of a checkpoint on one split; optional ROC CSV."""
    model = load_model(checkpoint)
    records = _load_records(dataset)
    if isinstance(model, DvaeModel):
        splits = _splits_for_model(model, records)
        idx = _split_indices(splits, split_name)
    else:
        idx = np.arange(len(records))
    comps = [records[i].composition for i in idx]
    labels = np.array([records[i].label for i in idx])
    probs = model.classify_features(features_matrix(comps))
    acc = data_mod.accuracy(probs, labels)
    curve = data_mod.roc(probs, labels)
    click.echo(f"split={split_name} n={len(idx)} accuracy={acc:.6f} auc={curve.auc:.6f}")
    if out_path:
        rows = list(zip(curve.thresholds.tolist(), curve.fpr.tolist(), curve.tpr.tolist()))
        atomic_write_text(out_path, _csv_text(["threshold", "fpr", "tpr"], rows))
        click.echo(f"wrote {out_path}")


@main.command("reconstruct")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--split", "split_name", default="test", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--hist", "hist_path", type=click.Path(), default=None,
              help="write histogram JSON of the three MAES here")
@cli_errors
def cmd_reconstruct(checkpoint, dataset, split_name, out_path, hist_path):
    """Reconstruct every alloy in a split; report composition, probability and
    latent MAEs."""
    model = load_model(checkpoint)
    if not isinstance(model, DvaeModel):
        raise click.UsageError("reconstruct needs a full dvae checkpoint")
    records = _load_records(dataset)
    splits = _splits_for_model(model, records)
    idx = _split_indices(splits, split_name)

    rows = []
    comp_maes, prob_maes, latent_maes = [], [], []
    for i in idx:
        rec = records[i]
        recon, p_hat, mu = model.reconstruct(rec.composition)
        x = to_vector(rec.composition)
        xhat = to_vector(recon)
        comp_mae = float(np.abs(x - xhat).mean())
        p_recon = model.classify(recon)
        mu_recon, _ = model.encode(recon, p_recon)
        prob_mae = abs(p_recon - p_hat)
        latent_mae = float(np.abs(mu_recon - mu).mean())
        comp_maes.append(comp_mae)
        prob_maes.append(prob_mae)
        latent_maes.append(latent_mae)
        rows.append([rec.formula, format_standard(recon), float(p_hat), int(rec.label),
                     comp_mae, float(prob_mae), latent_mae])
    click.echo(
        f"split={split_name} n={len(idx)} "
        f"composition MAE mean={np.mean(comp_maes):.6f} max={np.max(comp_maes):.6f} "
        f"probability MAE mean={np.mean(prob_maes):.6f} "
        f"latent MAE mean={np.mean(latent_maes):.6f}"
    )
    if out_path:
        atomic_write_text(out_path, _csv_text(
            ["formula", "reconstructed", "predicted_p", "label",
             "composition_mae", "probability_mae", "latent_mae"], rows))
        click.echo(f"wrote {out_path}")
    if hist_path:
        hist = {}
        for name, vals in (("composition_mae", comp_maes),
                           ("probability_mae", prob_maes),
                           ("latent_mae", latent_maes)):
            counts, edges = np.histogram(vals, bins=20)
            hist[name] = {"counts": counts.tolist(), "edges": edges.tolist()}
        atomic_write_text(hist_path, _dump_json(hist))
        click.echo(f"wrote {hist_path}")


@main.command("invert")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--formula", required=True)
@click.option("--cutoff", type=float, default=0.6, show_default=True)
@click.option("--max-iters", type=int, default=10, show_default=True)
@cli_errors
def cmd_invert(checkpoint, formula, cutoff, max_iters):
    """Run the iterative inversion loop from a starting alloy and print the
    evolution chain."""
    model = load_model(checkpoint)
    if not isinstance(model, DvaeModel):
        raise click.UsageError("invert needs a full dvae checkpoint")
    comp = parse_formula(formula)
    trace = design.invert(model, comp, cutoff=cutoff, max_iters=max_iters)
    chain = " -> ".join(
        f"{format_standard(s.alloy)} [y={s.probability:.3f}, "
        f"z=({s.latent[0]:.3f}, {s.latent[1]:.3f})]"
        for s in trace.steps
    )
    click.echo(chain)
    click.echo(f"converged={trace.converged} cutoff={trace.cutoff} steps={len(trace.steps)}")


@main.command("grid")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--z1", "z1_range", default="-0.1:0.1:5", show_default=True)
@click.option("--z2", "z2_range", default="-0.5:-0.3:5", show_default=True)
@click.option("--targets", default="0,1", show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@cli_errors
def cmd_grid(checkpoint, z1_range, z2_range, targets, out_path):
    """Interpolation study over a latent grid at fixed target probabilities."""
    model = load_model(checkpoint)
    if not isinstance(model, DvaeModel):
        raise click.UsageError("grid needs a full dvae checkpoint")
    z1 = parse_range(z1_range)
    z2 = parse_range(z2_range)
    target_list = [float(t) for t in targets.split(",") if t != ""]
    rows = design.grid_study(model, z1, z2, target_list)
    out_rows = [[r.z1, r.z2, r.target_p, format_standard(r.composition), r.recheck_p]
                for r in rows]
    atomic_write_text(out_path, _csv_text(
        ["z1", "z2", "target_p", "alloy_formula", "recheck_p"], out_rows))
    click.echo(f"wrote {out_path} ({len(rows)} rows)")


@main.command("shap")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--split", "split_name", default="test", show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@cli_errors
def cmd_shap(checkpoint, dataset, split_name, out_dir):
    """Kernel-SHAP attributions over a split; CSV plus beeswarm JSON."""
    model = load_model(checkpoint)
    if not isinstance(model, DvaeModel):
        raise click.UsageError("shap needs a full dvae checkpoint")
    if model.shap_background is None:
        raise CheckpointError("checkpoint carries no SHAP background sample")
    records = _load_records(dataset)
    splits = _splits_for_model(model, records)
    idx = _split_indices(splits, split_name)
    evaluation = [records[i] for i in idx]
    gi = explain.global_importance(model, evaluation, model.shap_background)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = list(gi.feature_names)
    rows = []
    for i, rec in enumerate(evaluation):
        rows.append([int(idx[i]), rec.formula,
                     *[float(v) for v in gi.instances_raw[i]],
                     *[float(v) for v in gi.shap_values[i]],
                     float(gi.base_values[i]), float(gi.model_outputs[i])])
    header = (["index", "formula"] + [f"value_{n}" for n in names]
              + [f"shap_{n}" for n in names] + ["base_value", "model_output"])
    atomic_write_text(out / "shap.csv", _csv_text(header, rows))
    atomic_write_text(out / "beeswarm.json", _dump_json(gi.to_jsonable()))
    order = np.argsort(-gi.mean_abs)
    click.echo("mean |shap| by feature:")
    for j in order:
        click.echo(f"  {names[j]:13s} {gi.mean_abs[j]:.6f}")
    click.echo(f"wrote {out / 'shap.csv'} and {out / 'beeswarm.json'}")


@main.command("latent-map")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--plot", "plot_path", type=click.Path(), default=None)
@cli_errors
def cmd_latent_map(checkpoint, dataset, out_path, plot_path):
    """Latent posterior means plus a kernel-density grid, as JSON (and an
    optional static plot)."""
    model = load_model(checkpoint)
    if not isinstance(model, DvaeModel):
        raise click.UsageError("latent-map needs a full dvae checkpoint")
    records = _load_records(dataset)
    lm = design.latent_map(model, records, groups=design.DEFAULT_GROUPS)
    atomic_write_text(out_path, _dump_json(lm.to_jsonable()))
    click.echo(f"wrote {out_path} ({len(lm.points)} points)")
    if plot_path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
        zs = np.array([p["z"] for p in lm.points])
        labels = np.array([p["label"] for p in lm.points])
        for lab, color in ((0, "tab:orange"), (1, "tab:blue")):
            m = labels == lab
            axes[0].scatter(zs[m, 0], zs[m, 1], s=6, c=color, label=f"label {lab}", alpha=0.6)
        axes[0].legend()
        axes[0].set_xlabel("z1")
        axes[0].set_ylabel("z2")
        axes[1].contourf(lm.z1_grid, lm.z2_grid, lm.density, levels=24, cmap="viridis")
        axes[1].set_xlabel("z1")
        axes[1].set_ylabel("z2")
        fig.tight_layout()
        fig.savefig(plot_path, dpi=120)
        plt.close(fig)
        click.echo(f"wrote {plot_path}")


def _baseline_one(args):
    seed, dataset, sizes = args
    records = _load_records(dataset)
    splits = data_mod.split(records, sizes=sizes, seed=seed)
    y = np.array([r.label for r in records])
    f8 = features_matrix([r.composition for r in records])

    ss = train_model(DvaeConfig(seed=seed), records, splits).model
    sl = train_supervised_baseline(DvaeConfig(seed=seed), records,
                                   splits.labelled, splits.validation)
    ss_acc = data_mod.accuracy(ss.classify_features(f8[splits.test]), y[splits.test])
    sl_acc = data_mod.accuracy(sl.classify_features(f8[splits.test]), y[splits.test])
    return seed, ss_acc, sl_acc


@main.command("baseline")
@click.option("--dataset", type=click.Path(exists=True), default=None)
@click.option("--labelled", type=int, default=247, show_default=True)
@click.option("--unlabelled", type=int, default=790, show_default=True)
@click.option("--validation", type=int, default=198, show_default=True)
@click.option("--test", "test_size", type=int, default=138, show_default=True)
@click.option("--seeds", default="0,1,2,3,4", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@cli_errors
def cmd_baseline(dataset, labelled, unlabelled, validation, test_size, seeds, jobs,
                 out_path):
    """Data-efficiency comparison: semi-supervised vs supervised-only test
    accuracy per seed."""
    seed_list = parse_int_list(seeds)
    sizes = (labelled, unlabelled, validation, test_size)
    click.echo(f"split sizes: {sizes[0]}/{sizes[1]}/{sizes[2]}/{sizes[3]}")
    args = [(s, dataset, sizes) for s in seed_list]
    if jobs > 1 and len(seed_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_baseline_one, args))
    else:
        results = [_baseline_one(a) for a in args]
    click.echo("seed  semi_supervised_test_acc  supervised_test_acc")
    rows = []
    for seed, ss_acc, sl_acc in results:
        click.echo(f"{seed:4d}  {ss_acc:24.6f}  {sl_acc:19.6f}")
        rows.append([seed, ss_acc, sl_acc])
    ss_mean = statistics.fmean(r[1] for r in rows)
    sl_mean = statistics.fmean(r[2] for r in rows)
    click.echo(f"mean  {ss_mean:24.6f}  {sl_mean:19.6f}")
    if out_path:
        atomic_write_text(out_path, _csv_text(
            ["seed", "semi_supervised_test_acc", "supervised_test_acc"], rows))
        click.echo(f"wrote {out_path}")


@main.command("serve")
@click.option("--checkpoint", type=click.Path(exists=True), default=None,
              help="defaults to $DVAE_CHECKPOINT")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static-dir", type=click.Path(exists=True), default=None)
@cli_errors
def cmd_serve(checkpoint, port, host, static_dir):
    """Serve the HTTP JSON API (and optionally the static UI)."""
    import uvicorn

    from .service import create_app

    app = create_app(checkpoint_path=checkpoint, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
