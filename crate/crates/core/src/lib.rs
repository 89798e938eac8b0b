pub mod airy_limit;
pub mod ensemble_mc;
pub mod error;
pub mod exact;
pub mod finite_n;
pub mod fredholm;
pub mod par;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
