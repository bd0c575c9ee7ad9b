//! Exact integer substrate: multiplicative-function sieves, Ramanujan
//! sums, Ramanujan τ generation, and reduced-residue counting.

pub mod coeff;
pub mod ramanujan;
pub mod residues;
pub mod tables;
pub mod tau;

pub use coeff::{hecke_normalize, CoeffKind, CoeffSeq};
pub use ramanujan::{ramanujan_sum, RamanujanSumCache};
pub use residues::reduced_residue_count;
pub use tables::{divisors_of, factorize, is_prime, mobius_of, totient_of, ArithTables};
pub use tau::{tau_series, TAU_LIMIT_CEILING};
