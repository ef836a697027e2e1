"""
Configuration tables for RABICAT runs.

This module contains the declarative tables the run-config parser and the
CLI are driven by. To add a new configuration key:
1. Add an entry to ``CONFIG_SCHEMA`` under the section it belongs to
2. Thread the value through ``RunConfig`` in ``run_config.py``
3. If it should be settable from the command line, add it to ``FLAG_TO_KEY``
"""

# Configuration schema: section -> key -> spec
# Each key spec contains:
#   - type: converter applied to the raw text value ("float", "int", "str", "list")
#   - default: value used when neither file nor flags set the key
#              (None with required=True means the key must be given;
#               None with required=False means the default is derived)
#   - required: True if the key has no default
#   - help: one-line description, reused by the CLI
CONFIG_SCHEMA = {
    "model": {
        "R": {
            "type": "float",
            "default": None,
            "required": True,
            "help": "Size parameter (qubit/oscillator frequency ratio)",
        },
        "lambda": {
            "type": "float",
            "default": None,
            "required": True,
            "help": "Coupling strength",
        },
        "delta": {
            "type": "float",
            "default": None,
            "required": True,
            "help": "Rotating/counter-rotating mixing in [-1, 1]",
        },
        "mu": {
            "type": "float",
            "default": 0.0,
            "required": False,
            "help": "Parity-breaking strength",
        },
        "gamma": {
            "type": "float",
            "default": 0.0,
            "required": False,
            "help": "Oscillator damping constant (0 = unitary)",
        },
    },
    "fock": {
        "n_max": {
            "type": "int",
            "default": None,
            "required": False,
            "help": "Fock truncation (default ceil(4 R))",
        },
        "tail_tol": {
            "type": "float",
            "default": 1e-8,
            "required": False,
            "help": "Allowed probability weight in the top 5% of Fock levels",
        },
    },
    "plan": {
        "method": {
            "type": "str",
            "default": "auto",
            "required": False,
            "help": "Propagator: auto, eigendecomposition or krylov",
        },
        "dt": {
            "type": "float",
            "default": 0.01,
            "required": False,
            "help": "Output sampling step",
        },
        "t_max": {
            "type": "float",
            "default": 40.0,
            "required": False,
            "help": "Final time",
        },
        "krylov_dim": {
            "type": "int",
            "default": 30,
            "required": False,
            "help": "Krylov subspace dimension",
        },
        "step_tol": {
            "type": "float",
            "default": 1e-9,
            "required": False,
            "help": "Local error target per step",
        },
    },
    "outputs": {
        "outputs": {
            "type": "list",
            "default": None,
            "required": False,
            "help": "Observables written by the evolve command",
        },
    },
}

# Observable columns an evolve run can emit, in output order
SUPPORTED_OUTPUTS = (
    "t",
    "avg_x",
    "avg_p",
    "sigma_x",
    "sigma_y",
    "sigma_z",
    "parity",
    "overlap",
    "purity",
    "p_left",
    "energy",
)

DEFAULT_OUTPUTS = (
    "t",
    "avg_x",
    "avg_p",
    "sigma_x",
    "sigma_z",
    "parity",
    "overlap",
    "purity",
)

# Command-line flag destination -> configuration key
FLAG_TO_KEY = {
    "R": "R",
    "lam": "lambda",
    "delta": "delta",
    "mu": "mu",
    "gamma": "gamma",
    "nmax": "n_max",
    "tail_tol": "tail_tol",
    "method": "method",
    "dt": "dt",
    "tmax": "t_max",
    "krylov_dim": "krylov_dim",
    "step_tol": "step_tol",
}

# Key -> section lookup derived from the schema
KEY_SECTION = {key: section for section, keys in CONFIG_SCHEMA.items() for key in keys}
