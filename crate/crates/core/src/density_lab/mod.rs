//! Ranked prime-density experiments.

mod experiments;
mod fit;
mod montecarlo;
mod ranking;
mod tables;

pub use experiments::*;
pub use fit::*;
pub use montecarlo::*;
pub use ranking::*;
pub use tables::*;
