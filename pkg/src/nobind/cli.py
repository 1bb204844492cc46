"""Command-line front end.

Thin client over the service layer: by default commands execute in-process
through the same dispatch the HTTP service uses; with --url the config is
POSTed to a running service instead.  `nobind serve` starts the service.

Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numeric
failure.
"""

from __future__ import annotations

import os
import sys

import click

from .config import RunConfig, parse_config
from .errors import ConfigError, IoError, NobindError, NumericError
from .report import emit, provenance
from .runner import execute

_ENDPOINTS = {
    "optimize": "/optimize",
    "bound-curve": "/bound-curve",
    "verify": "/verify",
    "mc": "/mc",
    "kernels": "/kernels",
}


def _load_config(command: str, config_path: str, seed, threads) -> tuple[RunConfig, str]:
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    config = parse_config(text)
    if config.command is not None and config.command != command:
        raise ConfigError(
            f"config command {config.command!r} does not match CLI command {command!r}"
        )
    updates = {"command": command}
    if threads is None:
        threads = int(os.environ.get("NOBIND_THREADS", "0") or "0")
    updates["threads"] = threads
    config = config.model_copy(update=updates)
    if seed is not None:
        config = config.model_copy(
            update={"optimizer": config.optimizer.model_copy(update={"seed": seed})}
        )
        if config.mc is not None:
            config = config.model_copy(
                update={"mc": config.mc.model_copy(update={"seed": seed})}
            )
    return config, text


def _remote_body(config: RunConfig) -> dict:
    if config.command == "optimize":
        return {
            "model": config.model.model_dump(exclude_none=True),
            "optimizer": config.optimizer.model_dump(),
            "threads": config.threads,
        }
    if config.command == "bound-curve":
        return {
            "lambda_grid": config.lambda_grid,
            "optimizer": config.optimizer.model_dump(),
            "threads": config.threads,
        }
    if config.command == "verify":
        return {}
    if config.command == "mc":
        return {
            "model": config.model.model_dump(exclude_none=True),
            "mc": config.mc.model_dump(),
        }
    return {"kernels": config.kernels.model_dump()}


def _run_remote(config: RunConfig, url: str) -> tuple[dict, bool]:
    import httpx

    endpoint = url.rstrip("/") + _ENDPOINTS[config.command]
    try:
        resp = httpx.post(endpoint, json=_remote_body(config), timeout=600.0)
    except httpx.HTTPError as exc:
        raise IoError(f"cannot reach service at {url}: {exc}") from exc
    if resp.status_code >= 500:
        raise NumericError(f"service error {resp.status_code}: {resp.text}")
    if resp.status_code >= 400:
        raise ConfigError(f"service rejected request {resp.status_code}: {resp.text}")
    report = resp.json()
    ok = report.get("all_passed", report.get("jensen_consistent", True))
    if "worst_rel_diff" in report:
        ok = ok and report["worst_rel_diff"] < 1e-8
    return report, ok


def _run_command(command, config_path, out, fmt, threads, seed, url):
    try:
        config, text = _load_config(command, config_path, seed, threads)
        out_path = out or config.output.path
        out_fmt = fmt or config.output.format
        if url:
            report, ok = _run_remote(config, url)
        else:
            outcome = execute(config)
            report, ok = outcome.report, outcome.ok
        report["provenance"] = provenance(
            text, config.mc.seed if config.command == "mc" and config.mc else config.optimizer.seed
        )
        rendered = emit(report, out_fmt, out_path)
        if out_path is None:
            click.echo(rendered, nl=False)
        else:
            click.echo(f"wrote {out_path}")
        sys.exit(0 if ok else 1)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except IoError as exc:
        click.echo(f"io error: {exc}", err=True)
        sys.exit(2)
    except NumericError as exc:
        click.echo(f"numeric failure: {type(exc).__name__}: {exc}", err=True)
        sys.exit(3)
    except NobindError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


def _common_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(), help="JSON config file")(fn)
    fn = click.option("--out", default=None, type=click.Path(),
                      help="output file (default: stdout)")(fn)
    fn = click.option("--format", "fmt", default=None,
                      type=click.Choice(["csv", "json"]), help="output format")(fn)
    fn = click.option("--threads", default=None, type=int,
                      help="worker threads, 0 = auto (env NOBIND_THREADS)")(fn)
    fn = click.option("--seed", default=None, type=int, help="override RNG seed")(fn)
    fn = click.option("--url", default=None,
                      help="base URL of a running nobind service")(fn)
    return fn


@click.group()
def main():
    """Certified no-binding thresholds for polaron-type models."""


def _register(command: str, help_text: str):
    @main.command(name=command, help=help_text)
    @_common_options
    def _cmd(config_path, out, fmt, threads, seed, url):
        _run_command(command, config_path, out, fmt, threads, seed, url)


_register("optimize", "Minimize the truncated minimax objective and certify the tail.")
_register("bound-curve", "Tabulate the cutoff-dependent threshold on a grid.")
_register("verify", "Run the full invariant suite; exit 0 iff all checks pass.")
_register("mc", "Monte Carlo probe of the retarded action statistics.")
_register("kernels", "Evaluate the retarded kernel against its quadrature oracle.")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("nobind.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
