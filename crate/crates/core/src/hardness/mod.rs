//! Counting instances, their reduction to pricing instances, and the two
//! candidate menus whose comparison decides the count.

mod comp;
mod instance;
mod solutions;

pub use comp::{comp_to_compstar, count_tstar, CompInstance, CompStarInstance};
pub use instance::{build_hard_instance, build_hard_instance_unchecked, HardInstance};
pub use solutions::{build_solutions, decide_winner, SolutionPair, Verdict, Winner};
