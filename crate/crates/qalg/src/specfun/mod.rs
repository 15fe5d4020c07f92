//! Complex special functions and the Hankel-contour engine.

mod bernoulli;
mod gamma;
mod gamma2;
mod hankel;

pub use bernoulli::{bernoulli_number, bernoulli_poly, hurwitz_zeta};
pub use gamma::{gamma, log_gamma};
pub use gamma2::{bernoulli22, l0, l1, l2, log_gamma2, log_gamma2_continued};
pub use hankel::{hankel_integral, hankel_log_integral, HankelContour, SpecialValue};
