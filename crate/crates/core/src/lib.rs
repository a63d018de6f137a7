//! Moment bounds for the spectrum of signed graph Laplacians.
//!
//! Build a [`graph::Graph`], attach a [`spectral::WeightVector`], and ask
//! [`bounds::theorem_bounds`] for an interval containing every eigenvalue of
//! the weighted Laplacian away from the constant vector. The interval depends
//! on the weights only through their mean and second moment.
//!
//! ```
//! use siglap::{bounds, graph, spectral::WeightVector};
//!
//! let (g, w) = graph::Graph::with_weights(3, &[(0, 1, 1.0), (1, 2, -0.5), (0, 2, -0.5)]).unwrap();
//! let cert = bounds::theorem_bounds(&g, &w, true).unwrap();
//! assert!((cert.lower + 1.5).abs() < 1e-12 && (cert.upper - 1.5).abs() < 1e-12);
//! assert_eq!(cert.sandwich_violations(), 0);
//! # let _ = WeightVector::ones(&g);
//! ```

pub mod bounds;
pub mod ensembles;
pub mod graph;
pub mod linalg;
pub mod spectral;
pub mod verify;

pub use bounds::{theorem_bounds, BoundsCertificate, EdgeMoments, GraphSpectra, MuEstimate};
pub use graph::Graph;
pub use spectral::WeightVector;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/laplacians.md")]
    mod laplacians {}
    #[doc = include_str!("../../../book/src/mu.md")]
    mod mu {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
