//! Independent, brute-force routes to the quantities computed in closed form
//! elsewhere: explicit cloning unitaries reduced by partial traces, a numeric
//! search over measurements, and a per-pulse Monte Carlo of the protocol.

pub mod measurement;
pub mod monte_carlo;
pub mod simulate;

pub use measurement::{numeric_two_state_info, DEFAULT_ANGLE_GRID};
pub use monte_carlo::{monte_carlo_protocol, AnalyticRates, AttackSpec, Estimate, MonteCarloStats, DEFAULT_PULSES};
pub use simulate::{
    simulate_strategy_a, simulate_strategy_b, simulate_strategy_b_with, Check, SignalDisturbance, SimulationReport,
    INFO_TOL, STATE_TOL,
};
