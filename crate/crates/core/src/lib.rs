//! Numerical kernel for ruled Ricci surfaces.
//!
//! A non-developable ruled surface `X(t, u) = α(t) + u β(t)` carries a Ricci
//! metric exactly when `α` has constant torsion and `β` is its binormal. This
//! crate builds such surfaces from spherical curves, evaluates their
//! fundamental forms and curvatures by independent routes, and checks the
//! Ricci condition `K ΔK - |∇K|² - 4K³ = 0` numerically.

pub mod curve;
pub mod error;
pub mod export;
pub mod expr;
pub mod frenet;
pub mod gallery;
pub mod jet;
pub mod quadrature;
pub mod ricci;
pub mod ruled;
pub mod torsion;

pub use curve::{CurveDefinition, CurveEval, Interval, SpaceCurve};
pub use error::{Error, Result};
pub use export::MeshBuffer;
pub use expr::Expression;
pub use frenet::{arc_length, frenet, reparametrize_arclength, speed, FrenetData};
pub use gallery::{canonical_patch, GalleryEntry};
pub use jet::{CurveJet, Jet3};
pub use ricci::{MetricField, RicciReport, ScalarFn};
pub use ruled::{classify, distribution_parameter, RuledPatch, SurfaceClass};
pub use torsion::{integrate_alpha, validate_spherical, verify_binormal, ConstructedCurve, SphericalCurveCheck};
