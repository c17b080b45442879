pub mod classification;
pub mod cli;
pub mod constants;
pub mod error;
pub mod moduli_plane;
pub mod poly;
pub mod quartic_form;
pub mod report;
pub mod selfcheck;
pub mod ode;
pub mod slice_analysis;
pub mod standard_form;

pub use error::{Error, Result};
pub use quartic_form::{LinearMap2, Point2, QuarticForm};
