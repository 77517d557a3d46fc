//! Exact solvers for the augmented IRUP / non-IRUP bin packing benchmark families.

pub mod ai;
pub mod ani;
pub mod batch;
pub mod bpplib;
pub mod error;
pub mod exact;
pub mod generator;
pub mod instance;
pub mod mff;
pub mod solution;
pub mod subset;
pub mod triplet;

pub use error::{Error, Result};
pub use instance::{EligibilityReport, Instance, ItemType, Weight};
pub use solution::{
    verify_solution, Certificate, Pattern, Solution, SolveOutcome, Status, VerificationReport,
    Violation,
};
