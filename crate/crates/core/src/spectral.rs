//! Fast repeated evaluation of the scattering matrix of an equilateral graph.
//!
//! When every edge has the same length `l`, the path-family matrix is
//! `I - z T` with `z = exp(i k l)` and a `k`-independent bond transfer matrix
//! `T`. A single complex Schur factorization `T = Q U Q^H` turns each later
//! solve into a triangular one:
//!
//! ```text
//! sum_j P_aj^(f) = z w_a^T Q (I - z U)^{-1} Q^H R_f
//! ```
//!
//! with `w_a` selecting the bonds leaving `a` and `R_f` the unscaled
//! right-hand side of exit channel `f`. One triangular solve per entrance
//! channel yields a full column of `S(k)`.

use num_complex::Complex64 as C64;

use crate::graph::MetricGraph;
use crate::linalg::{schur, DenseMatrix};
use crate::scattering::{ScatteringError, ScatteringMatrix, VertexCoefficients};

/// Relative size below which a diagonal entry of `I - z U` counts as zero.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SpectralSolver {
    n: usize,
    length: f64,
    /// Lower triangle of `U^T`, row-major, row `m` holding `U[0..=m][m]`.
    lower: Vec<C64>,
    /// `Q^T w_a` for every entrance channel.
    entrance_rows: Vec<Vec<C64>>,
    /// `Q^H R_f` for every exit channel.
    exit_rows: Vec<Vec<C64>>,
    direct: Vec<Vec<f64>>,
    entrance_t: Vec<f64>,
    scale: f64,
}

/// Bond transfer matrix `T` with `M(k) = I - z T`.
pub fn transfer_matrix(g: &MetricGraph, coeffs: &VertexCoefficients) -> DenseMatrix {
    let n = 2 * g.num_edges();
    let mut t = DenseMatrix::zeros(n);
    for bond in g.directed_bonds() {
        let v = bond.to;
        t[(bond.index, bond.reversed_index())] += coeffs.r[v];
        for &(w, s) in g.neighbors(v) {
            if w != bond.from {
                t[(bond.index, g.bond_index(s, v))] += coeffs.t[v];
            }
        }
    }
    t
}

impl SpectralSolver {
    /// `None` for graphs with no edges, unequal lengths, or when the Schur
    /// iteration fails to converge.
    pub fn new(g: &MetricGraph, coeffs: &VertexCoefficients) -> Option<Self> {
        let length = g.common_length()?;
        let n = 2 * g.num_edges();
        if n == 0 {
            return None;
        }
        let t = transfer_matrix(g, coeffs);
        let scale = 1.0 + t.norm_inf();
        let factors = schur(t)?;
        let (q, u) = (factors.q, factors.u);

        let mut lower = Vec::with_capacity(n * (n + 1) / 2);
        for m in 0..n {
            lower.extend((0..=m).map(|j| u[(j, m)]));
        }

        let leads = g.leads();
        let entrance_rows = leads
            .iter()
            .map(|lead| {
                let a = lead.vertex;
                let bonds: Vec<usize> = g.neighbors(a).iter().map(|&(_, s)| g.bond_index(s, a)).collect();
                (0..n).map(|m| bonds.iter().map(|&b| q[(b, m)]).sum()).collect()
            })
            .collect();
        let exit_rows = leads
            .iter()
            .map(|lead| {
                let v = lead.vertex;
                let tv = coeffs.t[v];
                let bonds: Vec<usize> = g.neighbors(v).iter().map(|&(w, s)| g.bond_index(s, w)).collect();
                (0..n).map(|m| bonds.iter().map(|&b| q[(b, m)].conj() * tv).sum()).collect()
            })
            .collect();
        let direct = leads
            .iter()
            .map(|exit| {
                leads
                    .iter()
                    .enumerate()
                    .map(|(i, entry)| {
                        let a = entry.vertex;
                        if exit.channel == i {
                            coeffs.r[a]
                        } else if exit.vertex == a {
                            coeffs.t[a]
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let entrance_t = leads.iter().map(|lead| coeffs.t[lead.vertex]).collect();

        Some(Self { n, length, lower, entrance_rows, exit_rows, direct, entrance_t, scale })
    }

    pub fn num_channels(&self) -> usize {
        self.entrance_rows.len()
    }

    /// Column `entrance` of `S(k)`, indexed by exit channel.
    pub fn column(&self, k: f64, entrance: usize) -> Result<Vec<C64>, ScatteringError> {
        let l = self.num_channels();
        if entrance >= l {
            return Err(ScatteringError::ChannelOutOfRange { channel: entrance, count: l });
        }
        let z = C64::from_polar(1.0, k * self.length);
        let g = &self.entrance_rows[entrance];
        let mut x = vec![C64::new(0.0, 0.0); self.n];
        let mut offset = 0;
        for m in 0..self.n {
            let row = &self.lower[offset..offset + m + 1];
            offset += m + 1;
            let acc: C64 = row[..m].iter().zip(&x[..m]).map(|(u, xj)| u * xj).sum();
            let pivot = C64::new(1.0, 0.0) - z * row[m];
            if pivot.norm() < PIVOT_TOLERANCE * self.scale {
                return Err(ScatteringError::SingularSystem { k, step: m, pivot: pivot.norm() });
            }
            x[m] = (g[m] + z * acc) / pivot;
        }
        let factor = z * self.entrance_t[entrance];
        Ok((0..l)
            .map(|f| {
                let through: C64 = x.iter().zip(&self.exit_rows[f]).map(|(a, b)| a * b).sum();
                C64::new(self.direct[f][entrance], 0.0) + factor * through
            })
            .collect())
    }

    pub fn matrix(&self, k: f64) -> Result<ScatteringMatrix, ScatteringError> {
        let l = self.num_channels();
        let mut entries = vec![vec![C64::new(0.0, 0.0); l]; l];
        for i in 0..l {
            for (row, value) in entries.iter_mut().zip(self.column(k, i)?) {
                row[i] = value;
            }
        }
        Ok(ScatteringMatrix { entries, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, MetricGraph};
    use crate::scattering::{assemble_path_system, scattering_matrix, vertex_coefficients};

    fn triangle_with_tail() -> MetricGraph {
        MetricGraph::neumann(
            4,
            vec![Edge::unit(0, 1), Edge::unit(1, 2), Edge::unit(2, 0), Edge::unit(2, 3)],
            &[0, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn transfer_matrix_matches_path_system() {
        let g = triangle_with_tail();
        let c = vertex_coefficients(&g);
        let t = transfer_matrix(&g, &c);
        let k = 0.83;
        let z = C64::from_polar(1.0, k);
        let sys = assemble_path_system(&g, &c, k);
        for i in 0..t.dim() {
            for j in 0..t.dim() {
                let expected = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) } - z * t[(i, j)];
                assert!((sys.matrix[(i, j)] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn agrees_with_direct_solve() {
        let g = triangle_with_tail();
        let c = vertex_coefficients(&g);
        let fast = SpectralSolver::new(&g, &c).unwrap();
        for step in 0..40 {
            let k = 0.013 + step as f64 * 0.157;
            let a = fast.matrix(k).unwrap();
            let b = scattering_matrix(&g, &c, k).unwrap();
            for f in 0..3 {
                for i in 0..3 {
                    assert!((a.get(f, i) - b.get(f, i)).norm() < 1e-12, "k = {k}");
                }
            }
        }
    }

    #[test]
    fn scaled_lengths() {
        let g = triangle_with_tail().scale_lengths(0.5).unwrap();
        let c = vertex_coefficients(&g);
        let fast = SpectralSolver::new(&g, &c).unwrap();
        let a = fast.matrix(1.7).unwrap();
        let b = scattering_matrix(&g, &c, 1.7).unwrap();
        assert!(crate::oracle::max_deviation(&a, &b) < 1e-12);
    }

    #[test]
    fn unavailable_without_common_length() {
        let g = MetricGraph::neumann(3, vec![Edge::unit(0, 1), Edge::new(1, 2, 0.5)], &[0, 2]).unwrap();
        assert!(SpectralSolver::new(&g, &vertex_coefficients(&g)).is_none());
        let g = MetricGraph::neumann(1, vec![], &[0, 0]).unwrap();
        assert!(SpectralSolver::new(&g, &vertex_coefficients(&g)).is_none());
    }

    #[test]
    fn entrance_out_of_range() {
        let g = triangle_with_tail();
        let fast = SpectralSolver::new(&g, &vertex_coefficients(&g)).unwrap();
        assert!(matches!(fast.column(1.0, 3), Err(ScatteringError::ChannelOutOfRange { channel: 3, count: 3 })));
    }
}
