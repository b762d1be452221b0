"""Moments of polynomial SDEs from lattice walks of the backward Kolmogorov generator."""

from .extrapolation import EstimatePair, extrapolate, extrapolate1, extrapolate2
from .generator import Event, Generator, SdeModel, compile_generator
from .models import OUParams, VanDerPolParams, build_ou, build_van_der_pol, preset
from .oracle import McOracleConfig, OdeOracleConfig, mc_oracle, mc_oracle_many, ode_oracle, ou_closed_form
from .polynomial import Polynomial
from .propagator import (
    DivergenceError,
    Method,
    NumericalError,
    RunPlan,
    SingularDiagonalError,
    StepScheme,
    WeightMap,
    apply_generator,
    enumerate_walks,
    propagate,
    raw_moment,
    recover_raw_moment,
    resolvent2_apply,
    run,
    step_explicit1,
    step_explicit2,
    step_implicit1,
    step_implicit2,
)

__version__ = "0.1.0"
