//! Numerical building blocks: quadrature, small symmetric matrices,
//! ball volumes and binomials, random streams and parallel reduction.

pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use linalg::SymMatrix;
pub use par::{map_indexed, mean_and_stderr, pairwise_sum, Execution};
pub use quadrature::{integrate, integrate_box, integrate_ellipsoid, integrate_nested, integrate_pieces, BoxHints, Endpoints, Estimate, Quadric, QuadratureConfig};
pub use rng::RngStreams;
pub use special::{binom, elementary_symmetric, flag_coefficient, kappa};

/// `count` points spaced logarithmically on `[a, b]`.
pub fn log_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![b],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..count).map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp()).collect()
        }
    }
}

/// `count` points spaced uniformly on `[a, b]`.
pub fn linear_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
    }
}
