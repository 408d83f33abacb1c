//! Path-family formulation of the scattering matrix.
//!
//! Every directed bond `u -> v` carries an unknown path family `P_uv`: the
//! summed amplitude of all paths that enter the bond at `u` and eventually
//! leave the graph through a fixed exit channel `f`. With `z = exp(i k l_uv)`
//! the families satisfy
//!
//! ```text
//! P_uv - z r_v P_vu - z t_v sum_{w in N(v) \ {u}} P_vw = z t_v [f attaches at v]
//! ```
//!
//! where `N(v)` holds edge neighbours only; leaving through a lead is
//! accounted for by the right-hand side alone. The matrix does not depend on
//! `f`, so one factorization serves every exit channel.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{BoundaryKind, MetricGraph};
use crate::linalg::{DenseMatrix, LuFactors};
use crate::spectral::SpectralSolver;

/// Jitter step applied to a resonant wave number.
pub const JITTER: f64 = 1e-9 * TAU;
pub const MAX_JITTERS: usize = 3;
/// Largest accepted unitarity defect of a spectral evaluation.
pub const SPECTRAL_DEFECT_LIMIT: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("path system is singular at k = {k} (pivot {pivot:e} at step {step})")]
    SingularSystem { k: f64, step: usize, pivot: f64 },

    #[error("channel {channel} out of range ({count} leads)")]
    ChannelOutOfRange { channel: usize, count: usize },
}

/// Per-vertex reflection and transmission amplitudes. Both are real for the
/// supported boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCoefficients {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

pub fn vertex_coefficients(g: &MetricGraph) -> VertexCoefficients {
    let (r, t) = g
        .degrees()
        .iter()
        .zip(g.boundary())
        .map(|(&d, &b)| match (d, b) {
            (1, BoundaryKind::Neumann) => (1.0, 0.0),
            (1, BoundaryKind::Dirichlet) => (-1.0, 0.0),
            (d, _) => {
                let t = 2.0 / d as f64;
                (t - 1.0, t)
            }
        })
        .unzip();
    VertexCoefficients { r, t }
}

#[derive(Debug, Clone)]
pub struct PathSystem {
    pub matrix: DenseMatrix,
    /// One right-hand side per exit channel.
    pub rhs: Vec<Vec<C64>>,
    pub k: f64,
}

pub fn assemble_path_system(g: &MetricGraph, coeffs: &VertexCoefficients, k: f64) -> PathSystem {
    let n = 2 * g.num_edges();
    let mut matrix = DenseMatrix::identity(n);
    let mut rhs = vec![vec![C64::new(0.0, 0.0); n]; g.num_leads()];

    for bond in g.directed_bonds() {
        let v = bond.to;
        let z = C64::from_polar(1.0, k * g.edges()[bond.edge].length);
        let b = bond.index;
        matrix[(b, bond.reversed_index())] -= z * coeffs.r[v];
        let zt = z * coeffs.t[v];
        for &(w, s) in g.neighbors(v) {
            if w != bond.from {
                matrix[(b, g.bond_index(s, v))] -= zt;
            }
        }
        for f in g.channels_at(v) {
            rhs[f][b] = zt;
        }
    }
    PathSystem { matrix, rhs, k }
}

/// Path families `P^(f)` for every exit channel `f`, indexed by bond.
#[derive(Debug, Clone)]
pub struct PathFamilies {
    pub families: Vec<Vec<C64>>,
}

pub fn solve_path_families(system: &PathSystem) -> Result<PathFamilies, ScatteringError> {
    let lu = LuFactors::factor(system.matrix.clone()).map_err(|e| ScatteringError::SingularSystem {
        k: system.k,
        step: e.step,
        pivot: e.pivot,
    })?;
    Ok(PathFamilies { families: system.rhs.iter().map(|b| lu.solve(b)).collect() })
}

/// `entries[f][i]` is the amplitude for entering through channel `i` and
/// leaving through channel `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub entries: Vec<Vec<C64>>,
    pub k: f64,
}

impl ScatteringMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, exit: usize, entrance: usize) -> C64 {
        self.entries[exit][entrance]
    }

    pub fn identity(l: usize, k: f64) -> Self {
        let entries = (0..l)
            .map(|f| (0..l).map(|i| C64::new(if f == i { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        Self { entries, k }
    }

    pub fn to_json(&self) -> ScatteringMatrixJson {
        ScatteringMatrixJson {
            k: self.k,
            matrix: self
                .entries
                .iter()
                .map(|row| row.iter().map(|c| ComplexJson { re: c.re, im: c.im }).collect())
                .collect(),
            unitarity_defect: unitarity_defect(self),
            oracle_max_deviation: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringMatrixJson {
    pub k: f64,
    pub matrix: Vec<Vec<ComplexJson>>,
    pub unitarity_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_max_deviation: Option<f64>,
}

pub fn scattering_matrix(
    g: &MetricGraph,
    coeffs: &VertexCoefficients,
    k: f64,
) -> Result<ScatteringMatrix, ScatteringError> {
    let paths = solve_path_families(&assemble_path_system(g, coeffs, k))?;
    let l = g.num_leads();
    let mut entries = vec![vec![C64::new(0.0, 0.0); l]; l];
    for (i, entry) in g.leads().iter().enumerate() {
        let a = entry.vertex;
        for (f, exit) in g.leads().iter().enumerate() {
            let direct = if f == i {
                coeffs.r[a]
            } else if exit.vertex == a {
                coeffs.t[a]
            } else {
                0.0
            };
            let family = &paths.families[f];
            let through: C64 = g.neighbors(a).iter().map(|&(_, s)| family[g.bond_index(s, a)]).sum();
            entries[f][i] = C64::new(direct, 0.0) + through * coeffs.t[a];
        }
    }
    Ok(ScatteringMatrix { entries, k })
}

/// `max |(S^H S - I)_ij|`.
pub fn unitarity_defect(s: &ScatteringMatrix) -> f64 {
    let l = s.dim();
    let mut worst: f64 = 0.0;
    for i in 0..l {
        for j in 0..l {
            let dot: C64 = (0..l).map(|f| s.entries[f][i].conj() * s.entries[f][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// A graph paired with its vertex coefficients, evaluated at many `k`.
///
/// Equilateral graphs are evaluated through a [`SpectralSolver`]; other
/// graphs solve the path system from scratch at every `k`. A spectral result
/// that violates flux conservation by more than [`SPECTRAL_DEFECT_LIMIT`] is
/// discarded in favour of the direct solve.
#[derive(Debug, Clone)]
pub struct Scatterer<'g> {
    graph: &'g MetricGraph,
    coeffs: VertexCoefficients,
    spectral: Option<SpectralSolver>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub matrix: ScatteringMatrix,
    /// Number of jitters needed to leave a resonance.
    pub retries: usize,
}

impl<'g> Scatterer<'g> {
    pub fn new(graph: &'g MetricGraph) -> Self {
        let coeffs = vertex_coefficients(graph);
        let spectral = SpectralSolver::new(graph, &coeffs);
        Self { graph, coeffs, spectral }
    }

    /// Always factorizes the full path system.
    pub fn direct(graph: &'g MetricGraph) -> Self {
        Self { graph, coeffs: vertex_coefficients(graph), spectral: None }
    }

    pub fn graph(&self) -> &MetricGraph {
        self.graph
    }

    pub fn coefficients(&self) -> &VertexCoefficients {
        &self.coeffs
    }

    pub fn is_spectral(&self) -> bool {
        self.spectral.is_some()
    }

    pub fn matrix(&self, k: f64) -> Result<ScatteringMatrix, ScatteringError> {
        if let Some(fast) = &self.spectral {
            if let Ok(s) = fast.matrix(k) {
                if unitarity_defect(&s) <= SPECTRAL_DEFECT_LIMIT {
                    return Ok(s);
                }
            }
        }
        scattering_matrix(self.graph, &self.coeffs, k)
    }

    /// Column `entrance` of `S(k)`, indexed by exit channel.
    pub fn column(&self, k: f64, entrance: usize) -> Result<Vec<C64>, ScatteringError> {
        let l = self.graph.num_leads();
        if entrance >= l {
            return Err(ScatteringError::ChannelOutOfRange { channel: entrance, count: l });
        }
        if let Some(fast) = &self.spectral {
            if let Ok(column) = fast.column(k, entrance) {
                let norm: f64 = column.iter().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() <= SPECTRAL_DEFECT_LIMIT {
                    return Ok(column);
                }
            }
        }
        let s = scattering_matrix(self.graph, &self.coeffs, k)?;
        Ok(s.entries.iter().map(|row| row[entrance]).collect())
    }

    /// Evaluates at `k`, stepping forward by [`JITTER`] up to
    /// [`MAX_JITTERS`] times while the path system is singular. The returned
    /// matrix records the wave number actually used.
    pub fn matrix_jittered(&self, k: f64) -> Result<Evaluation, ScatteringError> {
        let mut last = None;
        for retries in 0..=MAX_JITTERS {
            match self.matrix(k + retries as f64 * JITTER) {
                Ok(matrix) => return Ok(Evaluation { matrix, retries }),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, MetricGraph};
    use std::f64::consts::FRAC_PI_2;

    fn alpha() -> MetricGraph {
        MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 0]).unwrap()
    }

    fn transparent_pair() -> MetricGraph {
        MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 1]).unwrap()
    }

    #[test]
    fn coefficients_by_degree() {
        let g = alpha();
        let c = vertex_coefficients(&g);
        assert!((c.r[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((c.t[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.r[1], 1.0);

        let c = vertex_coefficients(&transparent_pair());
        assert_eq!((c.r[0], c.t[0]), (0.0, 1.0));

        let c = vertex_coefficients(&g.with_dead_ends(BoundaryKind::Dirichlet));
        assert_eq!(c.r[1], -1.0);
    }

    #[test]
    fn vertex_flux_conservation() {
        for d in 2..10usize {
            let t = 2.0 / d as f64;
            let r = t - 1.0;
            assert!((r * r + (d as f64 - 1.0) * t * t - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_path_system_rows() {
        let g = alpha();
        let k = 0.7;
        let z = C64::from_polar(1.0, k);
        let sys = assemble_path_system(&g, &vertex_coefficients(&g), k);
        // bond 0 = c->p, bond 1 = p->c
        assert_eq!(sys.matrix[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(sys.matrix[(1, 1)], C64::new(1.0, 0.0));
        assert!((sys.matrix[(0, 1)] + z).norm() < 1e-15);
        assert!((sys.matrix[(1, 0)] - z / 3.0).norm() < 1e-15);
        for f in 0..2 {
            assert_eq!(sys.rhs[f][0], C64::new(0.0, 0.0));
            assert!((sys.rhs[f][1] - z * 2.0 / 3.0).norm() < 1e-15);
        }
        let sol = solve_path_families(&sys).unwrap();
        let p_pc = (z * 2.0 / 3.0) / (1.0 + z * z / 3.0);
        assert!((sol.families[0][1] - p_pc).norm() < 1e-14);
        assert!((sol.families[0][0] - z * p_pc).norm() < 1e-14);
    }

    #[test]
    fn transparent_pair_families() {
        let g = transparent_pair();
        let z = C64::from_polar(1.0, 1.0);
        let sys = assemble_path_system(&g, &vertex_coefficients(&g), 1.0);
        let sol = solve_path_families(&sys).unwrap();
        // exit through channel 1 at vertex 1
        assert!((sol.families[1][0] - z).norm() < 1e-15);
        assert_eq!(sol.families[1][1], C64::new(0.0, 0.0));
        assert!((sol.families[0][1] - z).norm() < 1e-15);
        let s = scattering_matrix(&g, &vertex_coefficients(&g), 1.0).unwrap();
        assert!((s.get(1, 0) - z).norm() < 1e-15);
    }

    #[test]
    fn diagonal_is_one() {
        let g = MetricGraph::neumann(
            4,
            vec![Edge::unit(0, 1), Edge::unit(1, 2), Edge::unit(2, 0), Edge::new(2, 3, 0.4)],
            &[0, 3],
        )
        .unwrap();
        let sys = assemble_path_system(&g, &vertex_coefficients(&g), 2.3);
        for b in 0..sys.matrix.dim() {
            assert_eq!(sys.matrix[(b, b)], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn alpha_full_reflection() {
        let g = alpha();
        let s = scattering_matrix(&g, &vertex_coefficients(&g), FRAC_PI_2).unwrap();
        assert!((s.get(0, 0).norm() - 1.0).abs() < 1e-14);
        assert!(s.get(1, 0).norm() < 1e-14);
    }

    #[test]
    fn defect_examples() {
        assert_eq!(unitarity_defect(&ScatteringMatrix::identity(3, 0.0)), 0.0);
        let mut s = ScatteringMatrix::identity(2, 0.0);
        s.entries[1][1] = C64::new(0.0, 0.0);
        assert_eq!(unitarity_defect(&s), 1.0);
        let g = alpha();
        let s = scattering_matrix(&g, &vertex_coefficients(&g), 1.0).unwrap();
        assert!(unitarity_defect(&s) < 1e-12);
    }

    #[test]
    fn single_vertex_single_lead() {
        let g = MetricGraph::neumann(1, vec![], &[0]).unwrap();
        let s = Scatterer::new(&g).matrix(0.3).unwrap();
        assert_eq!(s.get(0, 0), C64::new(1.0, 0.0));
    }

    #[test]
    fn json_shape() {
        let g = alpha();
        let text = serde_json::to_string(&Scatterer::new(&g).matrix(1.0).unwrap().to_json()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["k"], 1.0);
        assert!(v["matrix"][1][0]["re"].is_f64());
        assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-12);
        assert!(v.get("oracle_max_deviation").is_none());
    }
}
