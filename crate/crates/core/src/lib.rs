//! Exact maximum-weight general factors by local search over a jump system
//! of degree sequences, with the supporting parity-interval geometry, a
//! weighted matching engine, brute-force references, and a randomized
//! verification harness.

pub mod bruteforce;
pub mod error;
pub mod generate;
pub mod graphfactor;
pub mod instance;
pub mod jumpcore;
pub mod lemmalab;
pub mod matching;
pub mod parityset;
pub mod report;

pub use error::{Error, Result};
pub use graphfactor::{
    solve_general_factor, Edge, Factor, FactorSolution, InitialStrategy, MultiGraph, Objective,
};
pub use instance::{Instance, InstanceError};
pub use jumpcore::{local_search, JumpOracle, Optimum, OracleAnswer, SearchTrace};
pub use parityset::{BProfile, GapFreeSet, IntVector, ParityInterval, ParityProduct};
