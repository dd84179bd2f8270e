//! Laplacian spectrum and spectral gap.

use serde::Serialize;

use crate::error::Result;
use crate::graph::Graph;
use crate::linalg::{self, EigenSolver, SymMatrix};

/// Default vertex limit for a dense spectral computation.
pub const DEFAULT_VERTEX_LIMIT: usize = 1500;
/// Hard limit, even when forced.
pub const FORCED_VERTEX_LIMIT: usize = 20_000;
/// Above this order the QL solver is used unless one is named explicitly.
pub const JACOBI_MAX_ORDER: usize = 400;
/// Relative zero threshold for eigenvalues.
pub const ZERO_THRESHOLD: f64 = 1e-8;
pub const GAP_TOL: f64 = 1e-8;

/// `D - A`.
pub fn laplacian(g: &Graph) -> SymMatrix {
    let n = g.num_vertices();
    let mut m = SymMatrix::zeros(n);
    for v in 0..n {
        m.add_sym(v, v, g.degree(v) as f64);
    }
    for (u, v) in g.edges() {
        m.add_sym(u, v, -1.0);
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub vertices: usize,
    pub eigenvalues: Vec<f64>,
    pub spectral_gap: Option<f64>,
    pub zero_multiplicity: usize,
    pub components: usize,
    pub solver: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SpectralReport {
    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Picks Jacobi for small matrices and tridiagonal QL for large ones.
pub fn default_solver(n: usize) -> Box<dyn EigenSolver> {
    if n <= JACOBI_MAX_ORDER {
        Box::new(linalg::Jacobi)
    } else {
        Box::new(linalg::TridiagonalQl)
    }
}

pub fn spectral_gap(g: &Graph) -> Result<SpectralReport> {
    spectral_gap_with(g, default_solver(g.num_vertices()).as_ref())
}

/// Smallest eigenvalue of `D - A` above `1e-8 * max(1, λ_max)`.
pub fn spectral_gap_with(g: &Graph, solver: &dyn EigenSolver) -> Result<SpectralReport> {
    let eig = solver.solve(&laplacian(g), linalg::DEFAULT_TOL, false)?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let zero = ZERO_THRESHOLD * top.max(1.0);
    let zero_multiplicity = eig.values.iter().filter(|&&l| l < zero).count();
    let spectral_gap = eig.values.iter().copied().find(|&l| l >= zero);
    let components = g.num_components();
    let mut warnings = Vec::new();
    if components > 1 {
        warnings.push(format!("graph is disconnected ({components} components)"));
    }
    if zero_multiplicity != components {
        warnings.push(format!(
            "zero multiplicity {zero_multiplicity} differs from component count {components}"
        ));
    }
    Ok(SpectralReport {
        vertices: g.num_vertices(),
        eigenvalues: eig.values,
        spectral_gap,
        zero_multiplicity,
        components,
        solver: solver.name(),
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapVerdict {
    pub pass: bool,
    pub gap: Option<f64>,
    pub ric: f64,
    /// Set when `ric <= 0` and the comparison says nothing.
    pub vacuous: bool,
}

/// A graph with positive curvature `K` has spectral gap at least `K`.
pub fn check_gap_vs_ricci(report: &SpectralReport, ric: f64) -> GapVerdict {
    let vacuous = ric <= 0.0;
    let pass = vacuous || report.spectral_gap.is_some_and(|l| l >= ric - GAP_TOL);
    GapVerdict {
        pass,
        gap: report.spectral_gap,
        ric,
        vacuous,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn laplacians() {
        assert_eq!(
            laplacian(&complete(2)).rows(),
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]]
        );
        let l = laplacian(&cycle(4));
        assert_eq!(l.rows()[0], vec![2.0, -1.0, 0.0, -1.0]);
        for g in [cycle(7), complete(5), hypercube(3)] {
            let l = laplacian(&g);
            for r in l.rows() {
                assert_eq!(r.iter().sum::<f64>(), 0.0);
            }
            assert_eq!(l.trace(), 2.0 * g.num_edges() as f64);
        }
    }

    #[test]
    fn gaps() {
        let r = spectral_gap(&complete(2)).unwrap();
        assert!((r.spectral_gap.unwrap() - 2.0).abs() < 1e-12);
        let r = spectral_gap(&cycle(4)).unwrap();
        let want = [0.0, 2.0, 2.0, 4.0];
        assert!(r
            .eigenvalues
            .iter()
            .zip(want)
            .all(|(a, b)| (a - b).abs() < 1e-12));
        let r = spectral_gap(&complete_bipartite(3, 3)).unwrap();
        assert!((r.spectral_gap.unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(r.zero_multiplicity, 1);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn disconnected_graph_warns() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let r = spectral_gap(&g).unwrap();
        assert_eq!(r.zero_multiplicity, 2);
        assert_eq!(r.components, 2);
        assert_eq!(r.warnings.len(), 1);
        assert!((r.spectral_gap.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn verdicts() {
        let k33 = spectral_gap(&complete_bipartite(3, 3)).unwrap();
        assert!(check_gap_vs_ricci(&k33, 2.0).pass);
        let c6 = spectral_gap(&cycle(6)).unwrap();
        let v = check_gap_vs_ricci(&c6, 0.0);
        assert!(v.pass && v.vacuous);
        let c4 = spectral_gap(&cycle(4)).unwrap();
        let v = check_gap_vs_ricci(&c4, 2.0);
        assert!(v.pass && !v.vacuous);
        assert!(!check_gap_vs_ricci(&c6, 2.0).pass);
    }

    #[test]
    fn solvers_agree_on_cycle_spectrum() {
        let g = cycle(30);
        let a = spectral_gap_with(&g, &linalg::Jacobi).unwrap();
        let b = spectral_gap_with(&g, &linalg::TridiagonalQl).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-9);
        }
        let want = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / 30.0).cos();
        assert!((a.spectral_gap.unwrap() - want).abs() < 1e-10);
    }
}
