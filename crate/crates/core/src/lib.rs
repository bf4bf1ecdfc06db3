//! Quadratic knapsack solving on a behavioral compute-in-memory model.
//!
//! Instances are annealed either with the capacity checked by an analog
//! inequality filter ([`SolveMode::Inequality`]) or with the constraint folded
//! into a penalty QUBO with auxiliary slack bits ([`SolveMode::Dqubo`]).

pub mod anneal;
pub mod bench;
pub mod bits;
pub mod cli;
pub mod crossbar;
pub mod error;
pub mod filter;
pub mod qkp;
pub mod qubo;
pub mod seed;

pub use anneal::{
    batch_runs, batch_solve, sa_run, AnnealSchedule, Annealer, Backend, BackendKind, BatchConfig, Problem, RunRecord,
    SolveMode,
};
pub use bits::BitVector;
pub use crossbar::{program_crossbar, program_crossbar_with, vmv_energy, CrossbarModel, EnergyReading};
pub use error::{Error, Result};
pub use filter::{filter_check, FilterConfig, FilterDecision, FilterModel};
pub use qkp::{
    brute_force_oracle, generate_instance, parse_instance, serialize_instance, GeneratorParams, QkpInstance,
};
pub use qubo::{
    build_dqubo, build_inequality_qubo, quantization_info, DQuboModel, InequalityQuboModel, QuantizationInfo,
    QuboMatrix,
};
