"""Measured solenoids in tori: dynamics, currents and dual forms."""

import json

from . import _core
from ._core import (
    ConfigError,
    ContractViolation,
    ConvergenceError,
    DomainError,
    __version__,
    command_names,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "ConvergenceError",
    "DomainError",
    "__version__",
    "command_names",
    "run",
    "echo",
    "homology_class",
    "pair_current",
    "asymptotic_cycle",
    "exterior_d",
    "wedge",
    "integrate_torus",
    "acceptance",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def run(command, config):
    """Run a CLI command in process. Returns (report dict, {file name: bytes})."""
    report, files, ok, _ = _core.run_command(command, _text(config))
    report = json.loads(report)
    report["ok"] = ok
    return report, dict(files)


def echo(config):
    return json.loads(_core.echo(_text(config)))


def homology_class(config):
    return _core.homology_class(_text(config))


def pair_current(config, form):
    return _core.pair_current(_text(config), _text(form))


def asymptotic_cycle(config, horizon):
    return _core.asymptotic_cycle(_text(config), float(horizon))


def exterior_d(form, n):
    return json.loads(_core.exterior_d(_text(form), n))


def wedge(a, b, n):
    return json.loads(_core.wedge(_text(a), _text(b), n))


def integrate_torus(form, n):
    return _core.integrate_torus(_text(form), n)


def acceptance(ids=()):
    return _core.acceptance(list(ids))
