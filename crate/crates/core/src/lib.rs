//! Simulated federated learning for autism-screening data.
//!
//! The crate covers the whole experimental pipeline:
//!
//! * [`data`]: CSV ingestion, missing-row removal, categorical encoding,
//!   class-balanced synthesis, behavioral/facial merging, train/test
//!   splitting, k-fold plans and client partitioning.
//! * [`landmarks`]: 68-point facial landmark records and the three facial
//!   distances (brow, eye, nose-to-lips) merged into tabular data.
//! * [`models`]: from-scratch logistic regression, a one-hidden-layer
//!   network, a Gini decision tree and brute-force k-NN.
//! * [`federation`]: clients, client selection, local rounds, weight
//!   averaging and the sample-size-weighted global accuracy.
//!
//! Every operation is a pure function of its inputs and a `u64` seed.
//!
//! ```
//! use fedscreen::federation::{global_accuracy, LocalUpdate};
//! use fedscreen::models::ModelParams;
//!
//! let update = |id, acc, size| LocalUpdate {
//!     client_id: id,
//!     params: ModelParams::zeros_linear(2),
//!     sample_size: size,
//!     local_accuracy: acc,
//!     local_loss: 0.0,
//! };
//! let updates = [update(0, 0.9, 10), update(1, 0.6, 30), update(2, 0.8, 60)];
//! let gacc = global_accuracy(&updates).unwrap();
//! assert!((gacc - 0.75).abs() < 1e-12);
//! ```

pub mod data;
mod error;
pub mod federation;
pub mod landmarks;
pub mod models;
pub mod seed;
pub(crate) mod sum;

pub use error::{Error, Result};

// The README and the guide under `book/` are compiled as doctests so their snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/landmarks.md")]
    mod landmarks {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/federation.md")]
    mod federation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
