"""Command-line front end, implemented as a thin HTTP client of the service.

By default the service app is mounted in-process (no sockets) through an
ASGI transport; pass --server to talk to a running instance instead. Exit
codes: 0 success, 2 invalid configuration, 3 unsupported regime (confining
shell, or d <= -4 in the approximation commands), 4 validation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_VALIDATION = 4


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette deprecation chatter
        from starlette.testclient import TestClient

    from .service import app

    # TestClient is an httpx.Client running the ASGI app in-process
    return TestClient(app, raise_server_exceptions=False)


def _load_config(path: str | None) -> dict:
    """Optional key=value config file; flags take precedence over it."""
    if not path:
        return {}
    allowed = {
        "eta", "tau", "lambda", "omega", "mass", "k", "k0", "sigma-k",
        "kmin", "kmax", "samples", "eps", "out", "format", "branch", "t", "nodes",
    }
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in allowed:
            raise click.UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()
    return values


def _merged(value, config: dict, cfg_key: str, param_name: str, cast=float):
    """Explicit flag wins; otherwise config file; otherwise the flag default."""
    src = click.get_current_context().get_parameter_source(param_name)
    flag_given = src is not None and src.name != "DEFAULT"
    if not flag_given and cfg_key in config:
        try:
            return cast(config[cfg_key])
        except ValueError:
            raise click.UsageError(f"config key {cfg_key!r}: cannot parse {config[cfg_key]!r}")
    return value


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _post(client: httpx.Client, path: str, payload: dict) -> httpx.Response:
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if resp.status_code == 409:
        detail = resp.json().get("detail", "unsupported regime")
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_REGIME)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_CONFIG)
    return resp


def _coupling_payload(eta, tau, lam, omega, mass) -> dict:
    return {"eta": eta, "tau": tau, "lambda": lam, "omega": omega, "mass": mass}


coupling_options = [
    click.option("--eta", type=float, default=0.0, show_default=True),
    click.option("--tau", type=float, default=0.0, show_default=True),
    click.option("--lambda", "lam", type=float, default=0.0, show_default=True),
    click.option("--omega", type=float, default=0.0, show_default=True),
    click.option("--mass", type=float, default=0.0, show_default=True),
]

common_options = coupling_options + [
    click.option("--config", type=click.Path(exists=True), default=None,
                 help="optional key=value config file; flags override it"),
    click.option("--out", type=click.Path(), default=None, help="write output to file"),
    click.option("--server", type=str, default=None,
                 help="base URL of a running service; default runs in-process"),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return wrap


def _gather_coupling(params, cfg):
    return _coupling_payload(
        _merged(params["eta"], cfg, "eta", "eta"),
        _merged(params["tau"], cfg, "tau", "tau"),
        _merged(params["lam"], cfg, "lambda", "lam"),
        _merged(params["omega"], cfg, "omega", "omega"),
        _merged(params["mass"], cfg, "mass", "mass"),
    )


@click.group()
def main():
    """Band structures, spectra, and approximations of shell-interaction Dirac operators."""


@main.command()
@add_options(common_options)
@click.option("--kmin", type=float, default=-3.0, show_default=True)
@click.option("--kmax", type=float, default=3.0, show_default=True)
@click.option("--samples", type=int, default=601, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "svg", "json"]), default="csv",
              show_default=True)
def bands(config, out, server, fmt, **params):
    """Sample energy bands over a k-range as CSV, SVG, or JSON."""
    cfg = _load_config(config)
    payload = {
        "coupling": _gather_coupling(params, cfg),
        "kmin": _merged(params["kmin"], cfg, "kmin", "kmin"),
        "kmax": _merged(params["kmax"], cfg, "kmax", "kmax"),
        "samples": _merged(params["samples"], cfg, "samples", "samples", int),
        "format": _merged(fmt, cfg, "format", "fmt", str),
    }
    with _client(server) as client:
        resp = _post(client, "/bands", payload)
    _emit(resp.text, out)


@main.command()
@add_options(common_options)
def spectrum(config, out, server, **params):
    """Full-operator spectrum as JSON (ac / pp / sc components)."""
    cfg = _load_config(config)
    payload = {"coupling": _gather_coupling(params, cfg)}
    with _client(server) as client:
        resp = _post(client, "/spectrum", payload)
    _emit(json.dumps(resp.json(), indent=2), out)


@main.command()
@add_options(common_options)
@click.option("--k", type=float, default=0.0, show_default=True)
def fiber(config, out, server, k, **params):
    """Fiber eigenvalues at one k, cross-checked against the oracle."""
    cfg = _load_config(config)
    payload = {"coupling": _gather_coupling(params, cfg), "k": _merged(k, cfg, "k", "k")}
    with _client(server) as client:
        resp = _post(client, "/fiber", payload)
    _emit(json.dumps(resp.json(), indent=2), out)


@main.command()
@add_options(common_options)
@click.option("--k", type=float, default=0.0, show_default=True)
@click.option("--eps", type=str, default="1e-1,1e-2,1e-3", show_default=True,
              help="comma-separated positive widths")
@click.option("--branch", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
def approx(config, out, server, k, eps, branch, fmt, **params):
    """Convergence sweep of the regularized model against the shell model."""
    cfg = _load_config(config)
    eps_str = _merged(eps, cfg, "eps", "eps", str)
    try:
        eps_list = [float(p) for p in str(eps_str).split(",") if p.strip()]
    except ValueError:
        raise click.UsageError(f"cannot parse --eps {eps_str!r}")
    payload = {
        "coupling": _gather_coupling(params, cfg),
        "k": _merged(k, cfg, "k", "k"),
        "eps": eps_list,
        "branch": _merged(branch, cfg, "branch", "branch", int),
        "format": _merged(fmt, cfg, "format", "fmt", str),
    }
    with _client(server) as client:
        resp = _post(client, "/approx", payload)
    _emit(resp.text, out)


@main.command("resolvent-check")
@add_options(common_options)
@click.option("--k", type=float, default=0.0, show_default=True)
@click.option("--eps", type=float, default=0.05, show_default=True)
def resolvent_check(config, out, server, k, eps, **params):
    """Probe-set estimate of the eps-vs-shell resolvent difference."""
    cfg = _load_config(config)
    payload = {
        "coupling": _gather_coupling(params, cfg),
        "k": _merged(k, cfg, "k", "k"),
        "eps": _merged(eps, cfg, "eps", "eps"),
    }
    with _client(server) as client:
        resp = _post(client, "/resolvent-check", payload)
    body = resp.json()
    _emit(json.dumps(body, indent=2), out)
    if not body["ok"]:
        sys.exit(EXIT_VALIDATION)


@main.command()
@add_options(common_options)
@click.option("--k0", type=float, default=0.0, show_default=True)
@click.option("--sigma-k", type=float, default=0.3, show_default=True)
@click.option("--nodes", type=int, default=512, show_default=True)
@click.option("--t", type=float, default=0.0, show_default=True)
def packet(config, out, server, k0, sigma_k, nodes, t, **params):
    """Wave-packet magnitude on a spatial grid at time t."""
    cfg = _load_config(config)
    payload = {
        "coupling": _gather_coupling(params, cfg),
        "k0": _merged(k0, cfg, "k0", "k0"),
        "sigma_k": _merged(sigma_k, cfg, "sigma-k", "sigma_k"),
        "nodes": _merged(nodes, cfg, "nodes", "nodes", int),
        "t": _merged(t, cfg, "t", "t"),
    }
    with _client(server) as client:
        resp = _post(client, "/packet", payload)
    _emit(json.dumps(resp.json(), indent=2), out)


@main.command()
@click.option("--out", type=click.Path(), default=None)
@click.option("--server", type=str, default=None)
def validate(out, server):
    """Run the cross-verification suite; exit 4 on any failure."""
    with _client(server) as client:
        resp = _post(client, "/validate", {})
    body = resp.json()
    _emit(json.dumps(body, indent=2), out)
    if not body["passed"]:
        sys.exit(EXIT_VALIDATION)


if __name__ == "__main__":
    main()
