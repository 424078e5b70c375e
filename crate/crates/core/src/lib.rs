//! Laser-modified spontaneous emission of a decaying level coupled through a
//! strong laser to a third level (and to a ladder of further levels).

pub mod error;
pub mod form_factor;
pub mod quadrature;
pub mod self_energy;
pub mod spectrum;
pub mod dressed;
pub mod dynamics;
pub mod lab_units;
pub mod config;
pub mod tasks;
pub mod validate;

pub use error::{Error, Result};
pub use form_factor::{FormFactorModel, Multipole, SystemParams, TransitionSpec};
pub use self_energy::{PoleOptions, PoleResult, SheetLabel};
