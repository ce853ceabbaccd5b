//! Measuring how an adaptive model changes across modification steps.
//!
//! A model is retrained at steps `0..V` on a dataset that evolves with it. Given
//! the score `S(M_m | D_d)` of every model on the datasets it needs, this crate
//! reports per step:
//!
//! - **performance** `S(M_V | D_V)`;
//! - **learning** `S(M_V | D_V) − S(M_{V−1} | D_V)`, the gain from updating the model;
//! - **potential** `S(M_{V−1} | D_{V−1}) − S(M_{V−1} | D_V)`, how much the data
//!   moved away from the previous model;
//! - **retention** a decay-weighted average of `S(M_V | D_v)` over earlier datasets.
//!
//! Learning minus potential always equals the change in performance.
//!
//! Modules:
//!
//! - [`measurements`]: score matrices, the four measurements, per-step series;
//! - [`metrics`]: AUROC and confidence intervals over repetitions;
//! - [`simulator`]: synthetic populations, linear models, preset scenarios;
//! - [`io`]: matrix and report file formats, interpretation notes;
//! - [`cli`]: the `adaptive-eval` command.
//!
//! Runnable examples live in `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `toy_scenarios` | two-step matrices computed by hand |
//! | `retention_weights` | the decay constant and retention |
//! | `auroc_intervals` | AUROC with ties, bootstrap and normal intervals |
//! | `single_shift` | full plasticity under a gradual shift |
//! | `limited_plasticity` | frozen weights next to full plasticity |
//! | `double_shift` | two shifts and the notes they produce |
//! | `custom_scenario` | a scenario built from scratch |
//! | `file_formats` | reading and writing matrices and reports |
//!
//! ```
//! use adaptive_eval::measurements::{learning, potential, ScoreMatrix};
//!
//! let mut b = ScoreMatrix::builder(2, 1);
//! b.insert(0, 0, 0, 0.6)?.insert(0, 1, 0, 0.6)?.insert(1, 1, 0, 0.8)?;
//! let m = b.build();
//! assert!((learning(&m, 1, 0)? - 0.2).abs() < 1e-12);
//! assert_eq!(potential(&m, 1, 0)?, 0.0);
//! # Ok::<(), adaptive_eval::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod io;
pub mod measurements;
pub mod metrics;
pub mod simulator;

pub use error::{Error, Result};
