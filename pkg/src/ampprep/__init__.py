"""Statevector simulation of oracle-driven amplitude amplification for
analog-encoded state preparation, with exact oracle-query accounting."""

from ampprep.baseline import run_baseline
from ampprep.errors import ConfigurationError, ContractViolation, PostselectionError
from ampprep.fastprep import FastMethod, run_exact_prakash, run_exact_scaled, run_fast
from ampprep.oracle import OracleTable, QueryLedger, angles, arcsin_encode, make_table
from ampprep.structsim import reduced_run, reduced_run_baseline

__version__ = "0.1.0"
