//! Trigonometric solutions of the associative Yang-Baxter equation built from
//! associative Belavin-Drinfeld structures, with exact verification.

pub mod abd;
pub mod bundle;
pub mod catalog;
pub mod jet;
pub mod massey;
pub mod perm;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod suite;
pub mod surface;
pub mod tensor;
pub mod trig;
