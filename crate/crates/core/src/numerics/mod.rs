//! Shared numerical machinery: gamma functions, Mellin-Barnes integration,
//! hypergeometric series and real quadrature.

pub mod ddmath;
pub mod gamma;
pub mod hankel;
pub mod mb;
pub mod pfq;
pub mod quadrature;

pub use gamma::{beta, gamma, gamma_ratio, ln_gamma, ln_rgamma, rgamma};
pub use mb::{mb_integrate, ContourSpec, GammaArg, MbIntegrand, MbResult, TailModel};
pub use pfq::pfq_series;
