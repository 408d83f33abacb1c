//! Scattering matrices and average scattering entropy of open metric quantum
//! graphs.
//!
//! The scattering matrix `S(k)` of a graph with Neumann (Kirchhoff) vertices
//! is obtained from a linear system over directed-bond path families. Fixing
//! an entrance channel turns a column of `S(k)` into a probability vector
//! whose Shannon entropy, averaged over one period in `k`, is the average
//! scattering entropy (ASE) of the graph.
//!
//! ```
//! use qgase::{entropy, families};
//!
//! let alpha = families::build_line(&"a".parse().unwrap()).unwrap();
//! let ase = entropy::average_scattering_entropy(&alpha, 0, &Default::default()).unwrap();
//! assert!((ase.value - 0.503258).abs() < 5e-6);
//! ```

pub mod cli;
pub mod ensemble;
pub mod entropy;
pub mod families;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scattering;
pub mod spectral;

pub use entropy::{average_scattering_entropy, AseResult, QuadratureConfig};
pub use graph::{BoundaryKind, Edge, Lead, MetricGraph};
pub use scattering::{ScatteringMatrix, Scatterer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Scattering(#[from] scattering::ScatteringError),
    #[error(transparent)]
    Entropy(#[from] entropy::EntropyError),
    #[error(transparent)]
    Family(#[from] families::FamilyError),
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        use entropy::EntropyError as E;
        use ensemble::EnsembleError as N;
        match self {
            Error::Scattering(_) => true,
            Error::Entropy(e) => matches!(e, E::NoConvergence { .. } | E::NormalizationFailure { .. } | E::Scattering(_)),
            Error::Ensemble(N::Entropy { source, .. }) => {
                matches!(source, E::NoConvergence { .. } | E::NormalizationFailure { .. } | E::Scattering(_))
            }
            _ => false,
        }
    }
}
