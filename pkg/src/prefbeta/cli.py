"""Command-line interface: benchmark, terminal sessions, service, curves."""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click

from .acquisition import PolicyKind, QueryPolicy
from .bench import (
    DEFAULT_HOLDOUT_SIZE,
    TABLE1,
    evaluate_model,
    holdout_points,
    results_to_csv,
    run_benchmark,
    session_budget,
    simulated_oracle,
)
from .likelihood import MC_SAMPLES_REPORT, log_marginal_likelihood
from .model import curve_summary
from .session import OracleResponse, PreferenceSession

ALL_POLICIES = [k.value for k in PolicyKind]


def _parse_names(option_value: str, known: dict, what: str) -> list:
    if option_value.strip().lower() == "all":
        return list(known.values())
    picked = []
    for name in option_value.split(","):
        name = name.strip()
        if name not in known:
            raise click.BadParameter(
                f"unknown {what} {name!r}; choose from: {', '.join(known)} or 'all'"
            )
        picked.append(known[name])
    return picked


@click.group()
def main():
    """Preference-based utility learning over competing metrics."""


@main.command()
@click.option("--utilities", default="all", show_default=True,
              help="Comma-separated test utility names, or 'all'.")
@click.option("--policies", default="all", show_default=True,
              help="Comma-separated policies (random, single_entropy, pair_entropy), or 'all'.")
@click.option("--runs", default=5, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--budget-mode", type=click.Choice(["inclusive", "additive"]),
              default="inclusive", show_default=True,
              help="Whether initialization queries count toward the query budget.")
@click.option("--holdout", default=DEFAULT_HOLDOUT_SIZE, show_default=True, type=int)
@click.option("--jobs", default=1, show_default=True, type=int,
              help="Parallel workers (-1 for all cores).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write per-run results as CSV.")
def bench(utilities, policies, runs, seed, budget_mode, holdout, jobs, out):
    """Run the simulated-oracle benchmark grid."""
    suite = _parse_names(utilities, TABLE1, "utility")
    policy_map = {k.value: PolicyKind(k) for k in PolicyKind}
    kinds = _parse_names(policies, policy_map, "policy")

    def progress(utility, policy, run, tau, wall_ms):
        click.echo(f"  {utility:32s} {policy:14s} run {run}: tau={tau:+.4f} ({wall_ms / 1e3:.1f}s)")

    try:
        results = run_benchmark(
            suite, kinds, runs=runs, base_seed=seed, budget_mode=budget_mode,
            holdout_size=holdout, n_jobs=jobs, on_result=progress,
        )
    except Exception as exc:
        click.echo(f"benchmark failed: {exc}", err=True)
        sys.exit(1)
    click.echo()
    click.echo(f"{'utility':32s} {'policy':14s} {'mean tau':>9s}")
    for res in results:
        click.echo(f"{res.utility:32s} {res.policy:14s} {res.mean_tau:+9.4f}")
    if out:
        Path(out).write_text(results_to_csv(results))
        click.echo(f"\nwrote {out}")


@main.command()
@click.option("--utility", default="max_f1_plus_2f2", show_default=True,
              help="Simulated-oracle utility answering the queries.")
@click.option("--policy", type=click.Choice(ALL_POLICIES), default="pair_entropy",
              show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--budget-mode", type=click.Choice(["inclusive", "additive"]),
              default="inclusive", show_default=True)
@click.option("--manual", is_flag=True,
              help="Answer the queries yourself instead of the simulated oracle.")
def session(utility, policy, seed, budget_mode, manual):
    """Run one interactive terminal session."""
    if utility not in TABLE1:
        raise click.BadParameter(f"unknown utility {utility!r}; choose from: {', '.join(TABLE1)}")
    test = TABLE1[utility]
    sess = PreferenceSession(
        space=test.space(),
        policy=QueryPolicy(kind=PolicyKind(policy)),
        budget=session_budget(test.n_metrics, budget_mode),
        seed=seed,
    )
    click.echo(f"session vs '{test.pretty}' ({policy}, budget {sess.budget})\n")
    names = [f"f{i + 1}" for i in range(test.n_metrics)]
    while not sess.is_complete:
        pair = sess.next_query()
        idx = sess.queries_answered + 1
        phase = "init " if sess.in_initialization else "model"
        click.echo(f"[{idx:3d}/{sess.budget}] ({phase}) "
                   + "  ".join(f"{n}: A={a:.3f} B={b:.3f}" for n, a, b in zip(names, pair.a, pair.b)))
        if manual:
            choice = click.prompt("prefer", type=click.Choice(["A", "B", "E"]))
            response = OracleResponse(choice)
        else:
            response = simulated_oracle(test, pair)
            click.echo(f"      oracle says: {response.value}")
        sess.record_response(response)
    theta = sess.finalize()
    report = log_marginal_likelihood(sess.dataset, theta, MC_SAMPLES_REPORT,
                                     seed=sess.last_fit.mc_seed)
    tau = evaluate_model(theta, test, holdout_points(test, seed))
    click.echo(f"\nfinal log-likelihood ({MC_SAMPLES_REPORT} samples): {report.log_value:.3f}")
    click.echo(f"hold-out Kendall tau vs '{test.pretty}': {tau:+.4f}")


@main.command()
@click.option("--port", default=8789, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default="prefbeta_sessions", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--mc-samples", default=256, show_default=True, type=int,
              help="Monte-Carlo samples of each likelihood evaluation.")
@click.option("--candidates", default=2048, show_default=True, type=int,
              help="Candidate pairs scored per acquisition step.")
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False),
              help="Serve a built web UI from this directory at /.")
def serve(port, host, data_dir, mc_samples, candidates, ui_dir):
    """Start the HTTP preference service."""
    import uvicorn

    from .service import create_app

    app = create_app(
        data_dir=data_dir, mc_samples=mc_samples, n_candidates=candidates, ui_dir=ui_dir
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--session-file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="An exported session document.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output CSV path (default: stdout).")
@click.option("--grid", default=101, show_default=True, type=int)
@click.option("--samples", default=1000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
def curves(session_file, out, grid, samples, seed):
    """Emit per-metric utility-curve summaries for a stored session.

    The hyperparameters are refit on the stored dataset (fresh full fit,
    no warm start), then each metric's median/quartile curves are written
    as CSV rows: metric,x,median,q25,q75.
    """
    from .fitting import fit_mle

    sess = PreferenceSession.load(Path(session_file).read_bytes())
    result = fit_mle(sess.dataset, sess.fit_config, sess.space)
    lines = ["metric,x,median,q25,q75"]
    for i in range(sess.space.n_metrics):
        summary = curve_summary(result.theta_mle, i, sess.space,
                                n_samples=samples, grid_size=grid, seed=seed)
        for g in range(len(summary.grid)):
            lines.append(
                f"{i},{summary.grid[g]:.6f},{summary.median[g]:.6f},"
                f"{summary.q25[g]:.6f},{summary.q75[g]:.6f}"
            )
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
