"""Topological invariants and their dynamical readout in SSH-type qubit chains."""

from .errors import (
    AdiabaticityError,
    ContractError,
    CriticalPointError,
    EnsembleError,
    GapClosedError,
    NonHermitianError,
    NotEigenstateWarning,
    TopochainError,
    ValidationError,
)
from .model import (
    ChainSpec,
    CouplingProfile,
    DisorderSpec,
    apply_disorder,
    bloch_hamiltonian,
    build_couplings,
    chain_hamiltonian,
    chain_hamiltonian_stack,
    realspace_hamiltonian,
)
from .numerics import EigenSystem, eigh, evolve_schedule, evolve_spectral, evolve_times
from .topo import (
    BandSpectrum,
    ChernSet,
    band_spectrum,
    chern_numbers,
    ssh_couplings,
    winding_number_analytic,
    winding_number_integral,
)
from .dynamics import (
    EvolutionTrace,
    ced_expectation,
    critical_times,
    initial_bulk_excitation,
    run_quench,
    time_averaged_ced,
    winding_from_critical_time,
)
from .pump import (
    PumpResult,
    PumpSchedule,
    ce_expectation,
    chi_state,
    disorder_plateau_sweep,
    prepare_pump_state,
    run_pump,
)
from .ensemble import EnsembleReport, run_ensemble, sweep

__version__ = "0.1.0"
