"""Command-line shell for the full pipeline.

Subcommands: ingest | train | evaluate | simulate | recommend | serve.
Flag-less defaults reproduce the reference experiments: 10-fold CV with
20 trees, and the accuracy sweep with k=5, 100 simulated users, 10
repetitions over m = 10/20/33/50%. Machine-readable outputs land under
the --out directory and are byte-identical across runs for a fixed seed.
"""

from __future__ import annotations

import json
import os

import click

from .attributes import DEFAULT_SEED, SUBJECTIVE_ATTRIBUTES
from .dataset import DatasetError, clean, load_csv, read_cleaned, write_cleaned
from .evaluation import EvaluationError, cross_validate
from .forest import ForestConfig
from .mlp import MlpConfig
from .models import FAMILIES, load_model, save_model, train_regressor
from .recommender import RecommenderError, build_space, recommend
from .selection import pearson_matrix
from .simulate import DEFAULT_M_VALUES, SimulationError, accuracy_sweep
from .svr import SvrConfig, TargetSvrParams


def _ensure_out(out: str) -> str:
    os.makedirs(out, exist_ok=True)
    return out


def _load_family_config(family: str, config_path: str | None):
    if config_path is None:
        return None
    with open(config_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    section = payload.get(family)
    if section is None:
        return None
    if family == "rf":
        section = dict(section)
        if "features_per_split" not in section:
            section["features_per_split"] = "all"
        return ForestConfig(**section)
    if family == "svr":
        section = dict(section)
        per_target = section.pop("per_target", None)
        if per_target is not None:
            per_target = tuple(
                TargetSvrParams(C=float(p["C"]), gamma=float(p["gamma"]))
                for p in per_target
            )
        return SvrConfig(per_target=per_target, **section)
    section = dict(section)
    if "hidden_layers" in section:
        section["hidden_layers"] = tuple(section["hidden_layers"])
    return MlpConfig(**section)


@click.group()
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True,
              help="Master RNG seed; every output is reproducible from it.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with per-family model configs.")
@click.option("--out", type=click.Path(file_okay=False), default="out",
              show_default=True, help="Directory for machine-readable outputs.")
@click.option("--verbose", "-v", is_flag=True, help="Chatty progress output.")
@click.pass_context
def main(ctx, seed, config_path, out, verbose):
    """Coffee bean recommendation pipeline."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, config_path=config_path, out=out, verbose=verbose)


@main.command()
@click.argument("dataset", type=click.Path(dir_okay=False))
@click.pass_context
def ingest(ctx, dataset):
    """Clean a raw review CSV into the canonical dataset file."""
    out = _ensure_out(ctx.obj["out"])
    try:
        reviews = load_csv(dataset)
    except DatasetError as exc:
        raise click.ClickException(str(exc))
    result = clean(reviews)
    cleaned_path = os.path.join(out, "cleaned.csv")
    write_cleaned(result.records, cleaned_path)
    log_path = os.path.join(out, "cleaning_log.txt")
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write(result.log.as_text())
    if result.records:
        corr = pearson_matrix(result.records)
        with open(os.path.join(out, "correlation.tsv"), "w", encoding="utf-8") as fh:
            fh.write(corr.to_tsv())
    else:
        click.echo("warning: no valid rows survived cleaning", err=True)
    click.echo(
        f"cleaned {result.log.retained} of {result.log.total_rows} reviews "
        f"-> {cleaned_path}"
    )


def _read_dataset(path: str):
    try:
        return read_cleaned(path)
    except DatasetError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--dataset", type=click.Path(dir_okay=False), default="out/cleaned.csv",
              show_default=True, help="Cleaned dataset file (from ingest).")
@click.option("--family", type=click.Choice(FAMILIES), default="rf", show_default=True)
@click.pass_context
def train(ctx, dataset, family):
    """Fit a regressor on the full cleaned dataset and persist it."""
    out = _ensure_out(ctx.obj["out"])
    records = _read_dataset(dataset)
    if len(records) < 2:
        raise click.ClickException("training needs at least 2 cleaned records")
    config = _load_family_config(family, ctx.obj["config_path"])
    trained = train_regressor(records, family, config, seed=ctx.obj["seed"])
    model_path = os.path.join(out, f"model_{family}.json")
    save_model(trained, model_path)
    click.echo(f"trained {family} on {len(records)} records -> {model_path}")


@main.command()
@click.option("--dataset", type=click.Path(dir_okay=False), default="out/cleaned.csv",
              show_default=True)
@click.option("--family", type=click.Choice(FAMILIES), default="rf", show_default=True)
@click.option("--folds", type=click.IntRange(min=2), default=10, show_default=True)
@click.pass_context
def evaluate(ctx, dataset, family, folds):
    """10-fold cross-validated per-attribute RMSE for one model family."""
    out = _ensure_out(ctx.obj["out"])
    records = _read_dataset(dataset)
    config = _load_family_config(family, ctx.obj["config_path"])
    try:
        report = cross_validate(records, family, config, folds=folds,
                                seed=ctx.obj["seed"])
    except EvaluationError as exc:
        raise click.ClickException(str(exc))
    txt_path = os.path.join(out, f"cv_{family}.txt")
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(os.path.join(out, f"cv_{family}.tsv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_tsv())
    click.echo(report.to_text())


@main.command()
@click.option("--dataset", type=click.Path(dir_okay=False), default="out/cleaned.csv",
              show_default=True)
@click.option("--family", type=click.Choice(FAMILIES), default="rf", show_default=True)
@click.option("-k", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--m", "m_values", type=float, multiple=True,
              help="Hidden fractions; defaults to 0.10 0.20 0.33 0.50.")
@click.option("--users", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--repetitions", type=click.IntRange(min=1), default=10,
              show_default=True)
@click.pass_context
def simulate(ctx, dataset, family, k, m_values, users, repetitions):
    """Recommendation-accuracy sweep over hidden dataset fractions."""
    out = _ensure_out(ctx.obj["out"])
    records = _read_dataset(dataset)
    config = _load_family_config(family, ctx.obj["config_path"])
    try:
        report = accuracy_sweep(
            records, family=family, config=config, k=k,
            m_values=m_values or DEFAULT_M_VALUES, n_users=users,
            repetitions=repetitions, seed=ctx.obj["seed"],
        )
    except SimulationError as exc:
        raise click.ClickException(str(exc))
    with open(os.path.join(out, "accuracy.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(os.path.join(out, "accuracy.tsv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_tsv())
    click.echo(report.to_text())


def _preference_options(func):
    for attr in reversed(SUBJECTIVE_ATTRIBUTES):
        func = click.option(
            f"--{attr}", type=click.FloatRange(0.0, 10.0), required=True,
            help=f"Desired {attr} score in [0, 10].",
        )(func)
    return func


@main.command("recommend")
@click.option("--dataset", type=click.Path(dir_okay=False), default="out/cleaned.csv",
              show_default=True)
@click.option("--model", "model_path", type=click.Path(dir_okay=False), default=None,
              help="Optional model file; enables predicted entries via --hidden-fraction.")
@click.option("--hidden-fraction", type=click.FloatRange(0.0, 0.99), default=0.0,
              show_default=True)
@click.option("-k", type=click.IntRange(min=1), default=5, show_default=True)
@_preference_options
@click.pass_context
def recommend_cmd(ctx, dataset, model_path, hidden_fraction, k, **prefs):
    """Print the k beans nearest to the given preference scores."""
    records = _read_dataset(dataset)
    if hidden_fraction > 0.0:
        if model_path is None:
            raise click.ClickException("--hidden-fraction needs --model")
        from .dataset import partition, split_records

        model = load_model(model_path)
        part = partition(records, hidden_fraction, ctx.obj["seed"])
        reviewed, hidden = split_records(records, part)
        space = build_space(reviewed, list(zip(hidden, model.predict_records(hidden))))
    else:
        space = build_space(records, [])
    vector = [prefs[attr] for attr in SUBJECTIVE_ATTRIBUTES]
    try:
        results = recommend(space, vector, min(k, len(space)))
    except RecommenderError as exc:
        raise click.ClickException(str(exc))
    click.echo("rank\tbean_id\tmatch\tdistance\tprovenance\tspecies\tcountry\tvariety")
    for r in results:
        click.echo(
            f"{r.rank}\t{r.bean_id}\t{r.match_score:.3f}\t{r.distance:.4f}\t"
            f"{r.provenance}\t{r.species}\t{r.country_of_origin}\t{r.variety}"
        )


@main.command()
@click.option("--dataset", type=click.Path(dir_okay=False), default="out/cleaned.csv",
              show_default=True)
@click.option("--model", "model_path", type=click.Path(dir_okay=False),
              default="out/model_rf.json", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--k-default", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--hidden-fraction", type=click.FloatRange(0.0, 0.99), default=0.0,
              show_default=True,
              help="Serve this fraction of beans with model-predicted scores.")
@click.option("--dev", is_flag=True, help="Permissive CORS for UI development.")
@click.pass_context
def serve(ctx, dataset, model_path, host, port, k_default, hidden_fraction, dev):
    """Run the HTTP recommendation service."""
    from .server import ServiceConfig, serve as run_service

    cfg = ServiceConfig(
        dataset_path=dataset,
        model_path=model_path,
        host=host,
        port=port,
        k_default=k_default,
        seed=ctx.obj["seed"],
        hidden_fraction=hidden_fraction,
        dev_mode=dev,
        verbosity="debug" if ctx.obj["verbose"] else "info",
    )
    try:
        run_service(cfg)
    except FileNotFoundError as exc:
        raise click.ClickException(str(exc))


if __name__ == "__main__":
    main()
