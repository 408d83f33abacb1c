//! Independent scattering-matrix route through the bond scattering matrix.
//!
//! Unknowns are outgoing bond amplitudes `a_b` measured at the start of each
//! directed bond. Each vertex acts with its own `d x d` Kirchhoff matrix
//! `2/d J - I` (or `-1` for a Dirichlet dead end) on the incoming amplitudes
//! of its legs, so
//!
//! ```text
//! (I - S_B D(k)) a = S_L c,    out = S_LB D(k) a + S_LL c
//! ```
//!
//! with `D(k)` the diagonal of bond phases. This shares no code with the
//! path-family solver: vertex matrices are built leg by leg and the linear
//! solve goes through `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::graph::{BoundaryKind, MetricGraph};
use crate::scattering::{ScatteringError, ScatteringMatrix};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Leg {
    /// Arrives along the directed bond with this index.
    Bond(usize),
    Lead(usize),
}

fn vertex_matrix(d: usize, boundary: BoundaryKind) -> DMatrix<f64> {
    if d == 1 && boundary == BoundaryKind::Dirichlet {
        return DMatrix::from_element(1, 1, -1.0);
    }
    DMatrix::from_fn(d, d, |i, j| 2.0 / d as f64 - if i == j { 1.0 } else { 0.0 })
}

pub fn bond_scattering_matrix(g: &MetricGraph, k: f64) -> Result<ScatteringMatrix, ScatteringError> {
    let nb = 2 * g.num_edges();
    let l = g.num_leads();

    // incoming legs per vertex: bonds ending at v, then leads at v
    let mut legs: Vec<Vec<Leg>> = vec![Vec::new(); g.num_vertices()];
    for (s, e) in g.edges().iter().enumerate() {
        legs[e.v].push(Leg::Bond(2 * s));
        legs[e.u].push(Leg::Bond(2 * s + 1));
    }
    for lead in g.leads() {
        legs[lead.vertex].push(Leg::Lead(lead.channel));
    }

    let phase: Vec<C64> = (0..nb)
        .map(|b| C64::from_polar(1.0, k * g.edges()[b / 2].length))
        .collect();

    let zero = C64::new(0.0, 0.0);
    let mut system = DMatrix::<C64>::identity(nb, nb);
    let mut feed = DMatrix::<C64>::from_element(nb, l, zero);
    let mut out_bonds = DMatrix::<C64>::from_element(l, nb, zero);
    let mut direct = DMatrix::<C64>::from_element(l, l, zero);

    for (v, vlegs) in legs.iter().enumerate() {
        let sv = vertex_matrix(vlegs.len(), g.boundary_at(v));
        for (m, &out_leg) in vlegs.iter().enumerate() {
            for (n, &in_leg) in vlegs.iter().enumerate() {
                let amp = sv[(m, n)];
                match (out_leg, in_leg) {
                    // the outgoing bond along an incoming leg is its reverse
                    (Leg::Bond(bo), Leg::Bond(bi)) => system[(bo ^ 1, bi)] -= phase[bi] * amp,
                    (Leg::Bond(bo), Leg::Lead(c)) => feed[(bo ^ 1, c)] += amp,
                    (Leg::Lead(f), Leg::Bond(bi)) => out_bonds[(f, bi)] += phase[bi] * amp,
                    (Leg::Lead(f), Leg::Lead(c)) => direct[(f, c)] += amp,
                }
            }
        }
    }

    let amplitudes = if nb == 0 {
        DMatrix::from_element(0, l, zero)
    } else {
        system
            .lu()
            .solve(&feed)
            .ok_or(ScatteringError::SingularSystem { k, step: 0, pivot: 0.0 })?
    };
    let sigma = out_bonds * amplitudes + direct;
    let entries = (0..l).map(|f| (0..l).map(|i| sigma[(f, i)]).collect()).collect();
    Ok(ScatteringMatrix { entries, k })
}

/// Largest entrywise difference between two scattering matrices.
pub fn max_deviation(a: &ScatteringMatrix, b: &ScatteringMatrix) -> f64 {
    a.entries
        .iter()
        .flatten()
        .zip(b.entries.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::scattering::unitarity_defect;

    #[test]
    fn alpha_closed_form() {
        let g = MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 0]).unwrap();
        for k in [0.1, 0.9, 2.5] {
            let z2 = C64::from_polar(1.0, 2.0 * k);
            let s = bond_scattering_matrix(&g, k).unwrap();
            assert!((s.get(0, 0) - (z2 - 1.0) / (z2 + 3.0)).norm() < 1e-13);
            assert!((s.get(1, 0) - (z2 + 1.0) * 2.0 / (z2 + 3.0)).norm() < 1e-13);
            assert!(unitarity_defect(&s) < 1e-13);
        }
    }

    #[test]
    fn dirichlet_dead_end() {
        let g = MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 0])
            .unwrap()
            .with_dead_ends(BoundaryKind::Dirichlet);
        let k = 0.4;
        let z2 = C64::from_polar(1.0, 2.0 * k);
        let s = bond_scattering_matrix(&g, k).unwrap();
        assert!((s.get(0, 0) - (-z2 - 1.0) / (3.0 - z2)).norm() < 1e-13);
    }
}
