//! The nonlinear layer: `B(u) = ℙ(u·∇)u`, the Picard iteration, the
//! computable horizon with its contraction certificate, and pressure recovery.

pub mod engine;
pub mod horizon;
pub mod pressure;
pub mod solve;
pub mod tm;

pub use engine::{Ball, Datum, Engine, EngineConfig};
pub use horizon::{compute_horizon, IterationCertificate};
pub use solve::{nonlinearity, IterateOutput, LiftReport, SolveOutput, Solver};
pub use pressure::{pressure, pressure_field, PressureField, PressureOutput, PressureQuery};
