//! Spatio-temporal information diffusion in social networks, modelled with a
//! diffusive logistic reaction-diffusion equation.
//!
//! The pipeline runs from raw data to forecast scores:
//!
//! 1. [`graph`]: follow graph, hop and shared-interest distances, distance groups.
//! 2. [`events`]: vote logs and the empirical influenced-user density surface.
//! 3. [`spline`]: clamped cubic-spline initial density and its admissibility check.
//! 4. [`pde`]: Crank-Nicolson solver for the diffusive logistic equation.
//! 5. [`calibrate`]: accuracy metric, prediction reports and parameter fitting.
//! 6. [`synth`]: seeded synthetic graphs and vote cascades.
//!
//! Batch workloads (independent solves, fit restarts' simplex evaluations,
//! interest distances, cascade batches) go through [`exec`], which uses rayon
//! when the `parallel` feature is enabled and falls back to plain iteration
//! otherwise.

pub mod calibrate;
pub mod cli;
pub mod error;
pub mod events;
pub mod exec;
pub mod graph;
pub mod pde;
pub mod spline;
pub mod synth;

pub use error::{Error, Result};
