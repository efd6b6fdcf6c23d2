use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Errors raised by the geometry kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("parameter {t} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value while evaluating {0}")]
    NonFinite(String),

    #[error("curve speed vanishes at t = {t} (speed {speed:e})")]
    VanishingSpeed { t: f64, speed: f64 },

    #[error("curve is not regular at t = {t}: curvature {kappa:e} below threshold")]
    NonRegular { t: f64, kappa: f64 },

    #[error("spherical curve check failed: {0}")]
    NotSpherical(String),

    #[error(
        "spherical curve is a great circle (<B ^ B', B''> vanishes everywhere); \
         the ruled Ricci surface it generates is the helicoid, use the `helicoid` gallery entry"
    )]
    GreatCircle,

    #[error("normalization violated at t = {t}: {what} = {value:e}")]
    Normalization { t: f64, what: &'static str, value: f64 },

    #[error("degenerate geometry at (t, u) = ({t}, {u}): {what}")]
    Degenerate { t: f64, u: f64, what: &'static str },

    #[error("patch is not canonical at t = {t}: {what}")]
    NotCanonical { t: f64, what: String },

    #[error("finite-difference stencil at (t, u) = ({t}, {u}) with step {h} leaves the domain")]
    Margin { t: f64, u: f64, h: f64 },

    #[error("metric ansatz requires f^2 >= lambda^2, got f^2 - lambda^2 = {0:e}")]
    NegativeDelta(f64),

    #[error("unknown gallery entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
