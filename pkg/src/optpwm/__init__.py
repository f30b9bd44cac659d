"""Optimal placement of sinusoidally modulated PWM pulses.

Closed-form synthesis of single- and three-phase switching schedules, the
exact steady-state R-L current they drive, harmonic metrics, and a
box-constrained optimizer over the pulse displacement factors.
"""

from optpwm.waveform import (
    ScheduleError,
    SwitchingSchedule,
    is_quarter_wave_symmetric,
    validate,
    voltage_at,
    voltage_harmonic,
)
from optpwm.single_phase import (
    DisplacementFactors,
    SinglePhaseConfig,
    build_schedule,
    expand_alphas,
    pulse_widths,
    subinterval_centers,
)
from optpwm.three_phase import (  # noqa
    SectorPulseSet,
    ThreePhaseConfig,
    assemble_vab,
    build_sector,
    expand_alphas_3p,
    line_pulse_widths,
    line_schedules,
    validate_three_phase,
)
from optpwm.circuit import (
    PiecewiseCurrent,
    ReferenceSinusoid,
    RlBranch,
    current_at,
    phase_current_a,
    reference_current,
    resistance_from_amplitude,
    steady_state_current,
)
from optpwm.metrics import ThdReport, current_thd, l2_error, percent_improvement

__version__ = "0.1.0"

__all__ = [
    "DisplacementFactors",
    "PiecewiseCurrent",
    "ReferenceSinusoid",
    "RlBranch",
    "ScheduleError",
    "SectorPulseSet",
    "SinglePhaseConfig",
    "SwitchingSchedule",
    "ThdReport",
    "ThreePhaseConfig",
    "assemble_vab",
    "build_schedule",
    "build_sector",
    "current_at",
    "current_thd",
    "expand_alphas",
    "expand_alphas_3p",
    "is_quarter_wave_symmetric",
    "l2_error",
    "line_pulse_widths",
    "line_schedules",
    "percent_improvement",
    "phase_current_a",
    "pulse_widths",
    "reference_current",
    "resistance_from_amplitude",
    "steady_state_current",
    "subinterval_centers",
    "validate",
    "validate_three_phase",
    "voltage_at",
    "voltage_harmonic",
]
