"""oscpipe: 1D acoustics coupled to a chain of spring-mounted walls, its
homogenized limit, and the machinery to compare the two."""

from .backend import BACKEND
from .model import (ConfigurationError, EnergyBreakdown, FieldQuadruple, FiniteState,
                    JumpRegistry, MediumParams, OscillatorChain, SimGrid,
                    SupportViolation, apply_generator, energy, extract_jumps,
                    inner_product, norm, regular_part, static_solution)
from .finite import (Trajectory, build_grid, init_state, simulate, step, wall_update)
from .effective import (DensityProfile, EffGrid, EffTrajectory, EffectiveCoefficients,
                        EffectiveState, apply_L, coefficients, cutoff_omega,
                        effective_initial_data, make_eff_grid, simulate_effective,
                        slab_transfer, step_effective)
from .pulses import CompactBump, GaussianPulse

__version__ = "0.1.0"
