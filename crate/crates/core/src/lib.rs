//! A numerical-and-exact laboratory for the value distribution of
//! holomorphic curves into projective space: truncated jets, Green–Griffiths
//! jet differentials and Wronskians, circle quadrature for the Nevanlinna
//! functionals T/N/m, second-main-theorem margin reports, defect estimates,
//! and exact integer degree arithmetic.

pub mod brotbek;
pub mod cli;
pub mod curve;
pub mod divisor;
pub mod jetcore;
pub mod jetdiff;
pub mod poly;
pub mod radial;
pub mod smtdef;

pub use curve::{CurveExpr, HoloCurve};
pub use divisor::{Arrangement, Hypersurface, LineBundleO};
pub use jetcore::{Cx, JetSeries, Real};
pub use jetdiff::GGJetDifferential;
pub use radial::{RadialProfile, ZeroSet};
pub use smtdef::{DefectEstimate, SMTReport};
