//! BiEntropy and TriEntropy of binary and trinary expansions of the natural
//! numbers, and experiments relating them to prime density.

pub mod asymptotes;
pub mod bientropy;
pub mod bitstring;
pub mod density_lab;
pub mod error;
pub mod primality;
pub mod report;
pub mod trientropy;

pub use bientropy::{bien, bien_of_integer, bien_profile, shannon, EntropyProfile, LevelTerm};
pub use bitstring::{binary_derivative, derivative_chain, encode_binary, is_periodic, BitString};
pub use error::{Error, Result};
pub use primality::{classify, is_prime_trial, li_of, pi_of, sieve, Klass, PrimeTable};
pub use trientropy::{encode_trinary, ptd, trien, trien_of_integer, tribien, TritString};
