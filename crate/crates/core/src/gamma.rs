//! The operators `Δ`, `Γ`, `Γ₂` on graphs and the discrete Ricci curvature.
//!
//! Local curvature at `x` is the smallest Rayleigh quotient `Γ₂(f)(x) / Γ(f)(x)`
//! over functions with `f(x) = 0`. Only values on the first two spheres
//! around `x` matter. Writing `y = f|B(1,x)` and `z = f|B(2,x)`,
//! `2Γ₂(f)(x)` is a quadratic form in `(y, z)` in which each `z_u` occurs in a
//! single square-sum, so `z` can be eliminated in closed form. What remains is
//! `yᵀ M y` against `2Γ(f)(x) = |y|²`, and the curvature is `λ_min(M)`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{self, EigenSolver, SymMatrix};

/// A real function on (part of) the vertex set.
pub trait VertexFunction {
    fn value(&self, v: usize) -> Option<f64>;

    fn at(&self, v: usize) -> Result<f64> {
        self.value(v).ok_or(Error::MissingValue(v))
    }
}

impl VertexFunction for [f64] {
    fn value(&self, v: usize) -> Option<f64> {
        self.get(v).copied()
    }
}

impl VertexFunction for Vec<f64> {
    fn value(&self, v: usize) -> Option<f64> {
        self.get(v).copied()
    }
}

/// Values on `{x} ∪ B(1,x) ∪ B(2,x)` around a base vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFunction {
    pub base: usize,
    pub values: BTreeMap<usize, f64>,
}

impl VertexFunction for LocalFunction {
    fn value(&self, v: usize) -> Option<f64> {
        self.values.get(&v).copied()
    }
}

/// `Δf(x) = Σ_{v~x} (f(v) - f(x))`.
pub fn delta_op<F: VertexFunction + ?Sized>(g: &Graph, f: &F, x: usize) -> Result<f64> {
    g.check_vertex(x)?;
    let fx = f.at(x)?;
    g.neighbors(x)
        .iter()
        .try_fold(0.0, |acc, &v| Ok(acc + f.at(v)? - fx))
}

/// `Γ(f,h)(x) = ½ Σ_{v~x} (f(x) - f(v)) (h(x) - h(v))`.
pub fn gamma_op<F, H>(g: &Graph, f: &F, h: &H, x: usize) -> Result<f64>
where
    F: VertexFunction + ?Sized,
    H: VertexFunction + ?Sized,
{
    g.check_vertex(x)?;
    let (fx, hx) = (f.at(x)?, h.at(x)?);
    let s = g.neighbors(x).iter().try_fold(0.0, |acc, &v| {
        Ok::<_, Error>(acc + (fx - f.at(v)?) * (hx - h.at(v)?))
    })?;
    Ok(0.5 * s)
}

/// `Γ₂(f)(x) = ½ ΔΓ(f,f)(x) - Γ(f, Δf)(x)`, evaluated straight from the
/// definitions.
pub fn gamma2_def<F: VertexFunction + ?Sized>(g: &Graph, f: &F, x: usize) -> Result<f64> {
    g.check_vertex(x)?;
    let gamma_x = gamma_op(g, f, f, x)?;
    let lap_x = delta_op(g, f, x)?;
    let fx = f.at(x)?;
    let mut delta_gamma = 0.0;
    let mut gamma_f_lap = 0.0;
    for &v in g.neighbors(x) {
        delta_gamma += gamma_op(g, f, f, v)? - gamma_x;
        gamma_f_lap += (fx - f.at(v)?) * (lap_x - delta_op(g, f, v)?);
    }
    Ok(0.5 * delta_gamma - 0.5 * gamma_f_lap)
}

/// Closed-form `Γ₂(f)(x)` for `f(x) = 0`, as a sum of four parts: paths into
/// the second sphere, the square of the sum, edges inside the first sphere,
/// and the degree correction.
pub fn gamma2_formula<F: VertexFunction + ?Sized>(g: &Graph, f: &F, x: usize) -> Result<f64> {
    gamma2_closed_form(g, f, x, true)
}

/// The closed form with the edge term dropped, valid on triangle-free graphs.
pub fn gamma2_triangle_free<F: VertexFunction + ?Sized>(g: &Graph, f: &F, x: usize) -> Result<f64> {
    gamma2_closed_form(g, f, x, false)
}

fn gamma2_closed_form<F: VertexFunction + ?Sized>(
    g: &Graph,
    f: &F,
    x: usize,
    edge_term: bool,
) -> Result<f64> {
    g.check_vertex(x)?;
    let fx = f.at(x)?;
    if fx != 0.0 {
        return Err(Error::NonzeroBase(fx));
    }
    let dx = g.degree(x) as f64;
    let s1 = g.neighbors(x);
    let mut paths = 0.0;
    for u in g.ball(x, 2) {
        let fu = f.at(u)?;
        for &v in g.neighbors(u) {
            if g.has_edge(x, v) {
                let d = fu - 2.0 * f.at(v)?;
                paths += d * d;
            }
        }
    }
    let mut sum = 0.0;
    let mut degree = 0.0;
    for &v in s1 {
        let fv = f.at(v)?;
        sum += fv;
        degree += 0.5 * (4.0 - dx - g.degree(v) as f64) * fv * fv;
    }
    let mut edges = 0.0;
    if edge_term {
        for (i, &v) in s1.iter().enumerate() {
            for &w in &s1[i + 1..] {
                if g.has_edge(v, w) {
                    let (fv, fw) = (f.at(v)?, f.at(w)?);
                    edges += 2.0 * (fv - fw) * (fv - fw) + 0.5 * (fv * fv + fw * fw);
                }
            }
        }
    }
    Ok(0.5 * (0.5 * paths + sum * sum + edges + degree))
}

/// Relative gap between the closed form and the definition for `f` shifted
/// so that `f(x) = 0`, with a unit floor on the denominator.
pub fn gamma2_oracle_error(g: &Graph, f: &[f64], x: usize) -> Result<f64> {
    let fx = f.at(x)?;
    let shifted: Vec<f64> = f.iter().map(|v| v - fx).collect();
    let a = gamma2_def(g, f, x)?;
    let b = gamma2_formula(g, &shifted, x)?;
    Ok((a - b).abs() / a.abs().max(b.abs()).max(1.0))
}

/// A way of evaluating `Γ₂(f)(x)`.
pub trait Gamma2Evaluator: Send + Sync {
    fn name(&self) -> &'static str;
    /// Whether the evaluator needs `f(x) = 0`.
    fn requires_zero_base(&self) -> bool;
    fn eval(&self, g: &Graph, f: &dyn VertexFunction, x: usize) -> Result<f64>;
}

struct Definition;
struct ClosedForm;
struct TriangleFree;

impl Gamma2Evaluator for Definition {
    fn name(&self) -> &'static str {
        "definition"
    }
    fn requires_zero_base(&self) -> bool {
        false
    }
    fn eval(&self, g: &Graph, f: &dyn VertexFunction, x: usize) -> Result<f64> {
        gamma2_def(g, f, x)
    }
}

impl Gamma2Evaluator for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }
    fn requires_zero_base(&self) -> bool {
        true
    }
    fn eval(&self, g: &Graph, f: &dyn VertexFunction, x: usize) -> Result<f64> {
        gamma2_formula(g, f, x)
    }
}

impl Gamma2Evaluator for TriangleFree {
    fn name(&self) -> &'static str {
        "triangle-free"
    }
    fn requires_zero_base(&self) -> bool {
        true
    }
    fn eval(&self, g: &Graph, f: &dyn VertexFunction, x: usize) -> Result<f64> {
        gamma2_triangle_free(g, f, x)
    }
}

pub const GAMMA2_EVALUATORS: &[&str] = &["definition", "closed-form", "triangle-free"];

pub fn gamma2_evaluator(name: &str) -> Result<Box<dyn Gamma2Evaluator>> {
    match name {
        "definition" => Ok(Box::new(Definition)),
        "closed-form" => Ok(Box::new(ClosedForm)),
        "triangle-free" => Ok(Box::new(TriangleFree)),
        other => Err(Error::UnknownStrategy {
            kind: "gamma2 evaluator",
            name: other.to_string(),
        }),
    }
}

/// `2Γ₂` at `x`, minimized over the second sphere, as a form on `B(1,x)`.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    pub base: usize,
    /// `B(1,x)`, in the row order of `matrix`.
    pub sphere1: Vec<usize>,
    /// Each `u ∈ B(2,x)` with the positions in `sphere1` of its neighbours.
    pub sphere2: Vec<(usize, Vec<usize>)>,
    pub matrix: SymMatrix,
}

impl ReducedForm {
    /// The optimal second-sphere values `z_u = (2/n_u) Σ y_v` for given `y`.
    pub fn extend(&self, y: &[f64]) -> LocalFunction {
        let mut values = BTreeMap::new();
        values.insert(self.base, 0.0);
        for (&v, &yv) in self.sphere1.iter().zip(y) {
            values.insert(v, yv);
        }
        for (u, nbrs) in &self.sphere2 {
            let s: f64 = nbrs.iter().map(|&k| y[k]).sum();
            values.insert(*u, 2.0 * s / nbrs.len() as f64);
        }
        LocalFunction {
            base: self.base,
            values,
        }
    }
}

pub fn assemble_reduced_form(g: &Graph, x: usize) -> Result<ReducedForm> {
    g.check_vertex(x)?;
    let sphere1 = g.neighbors(x).to_vec();
    let d = sphere1.len();
    if d == 0 {
        return Err(Error::IsolatedVertex(x));
    }
    let pos: HashMap<usize, usize> = sphere1.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut m = SymMatrix::zeros(d);

    // ½ Σ_v (z_u - 2 y_v)² minimized at z_u = (2/n) Σ y_v
    // leaves 2 Σ y_v² - (2/n) (Σ y_v)².
    let sphere2: Vec<(usize, Vec<usize>)> = g
        .ball(x, 2)
        .into_iter()
        .map(|u| {
            let nbrs: Vec<usize> = g
                .neighbors(u)
                .iter()
                .filter_map(|v| pos.get(v).copied())
                .collect();
            (u, nbrs)
        })
        .collect();
    for (_, nbrs) in &sphere2 {
        let w = 2.0 / nbrs.len() as f64;
        for &a in nbrs {
            m.add_sym(a, a, 2.0);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            m.add_sym(a, a, -w);
            for &b in &nbrs[i + 1..] {
                m.add_sym(a, b, -w);
            }
        }
    }
    // (Σ y_v)²
    for a in 0..d {
        for b in a..d {
            m.add_sym(a, b, 1.0);
        }
    }
    // 2 (y_a - y_b)² + ½ (y_a² + y_b²) per edge inside B(1,x)
    for (a, &v) in sphere1.iter().enumerate() {
        for (b, &w) in sphere1.iter().enumerate().skip(a + 1) {
            if g.has_edge(v, w) {
                m.add_sym(a, a, 2.5);
                m.add_sym(b, b, 2.5);
                m.add_sym(a, b, -2.0);
            }
        }
    }
    let dx = d as f64;
    for (a, &v) in sphere1.iter().enumerate() {
        m.add_sym(a, a, 0.5 * (4.0 - dx - g.degree(v) as f64));
    }
    Ok(ReducedForm {
        base: x,
        sphere1,
        sphere2,
        matrix: m,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub vertex: usize,
    pub ric: f64,
    /// Minimizer with `f(x) = 0` and `Γ(f)(x) = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimizer: Option<LocalFunction>,
    pub form_dim: usize,
    pub sphere2_size: usize,
    pub solver: &'static str,
    pub tol: f64,
}

#[derive(Clone, Copy)]
pub struct CurvatureOptions<'a> {
    pub solver: &'a dyn EigenSolver,
    pub tol: f64,
    pub with_minimizer: bool,
}

impl Default for CurvatureOptions<'_> {
    fn default() -> Self {
        Self {
            solver: &linalg::Jacobi,
            tol: linalg::DEFAULT_TOL,
            with_minimizer: true,
        }
    }
}

/// `Ric(G)_x = λ_min(M)` for the reduced form `M` at `x`.
pub fn local_ricci(g: &Graph, x: usize) -> Result<CurvatureReport> {
    local_ricci_with(g, x, &CurvatureOptions::default())
}

pub fn local_ricci_with(g: &Graph, x: usize, opts: &CurvatureOptions) -> Result<CurvatureReport> {
    let form = assemble_reduced_form(g, x)?;
    let eig = opts
        .solver
        .solve(&form.matrix, opts.tol, opts.with_minimizer)?;
    let ric = eig.values[0];
    let minimizer = eig.vectors.map(|vs| {
        // |y|² = 2 gives Γ(f)(x) = 1
        let scale = 2f64.sqrt();
        let y: Vec<f64> = vs[0].iter().map(|c| c * scale).collect();
        form.extend(&y)
    });
    Ok(CurvatureReport {
        vertex: x,
        ric,
        minimizer,
        form_dim: form.sphere1.len(),
        sphere2_size: form.sphere2.len(),
        solver: opts.solver.name(),
        tol: opts.tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalCurvature {
    pub ric: f64,
    pub argmin: usize,
    /// Vertices in ascending order with their local curvature.
    pub per_vertex: Vec<(usize, f64)>,
}

impl GlobalCurvature {
    /// Largest deviation between any two local values.
    pub fn spread(&self) -> f64 {
        let max = self
            .per_vertex
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        max - self.ric
    }
}

/// Minimum of the local curvature over `vertices`, evaluated in parallel.
pub fn ricci_over(
    g: &Graph,
    vertices: &[usize],
    opts: &CurvatureOptions,
) -> Result<GlobalCurvature> {
    if g.num_vertices() == 0 || vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let opts = CurvatureOptions {
        with_minimizer: false,
        ..*opts
    };
    let per_vertex: Vec<(usize, f64)> = vertices
        .par_iter()
        .map(|&x| local_ricci_with(g, x, &opts).map(|r| (x, r.ric)))
        .collect::<Result<_>>()?;
    let (argmin, ric) =
        per_vertex
            .iter()
            .copied()
            .fold((usize::MAX, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
    Ok(GlobalCurvature {
        ric,
        argmin,
        per_vertex,
    })
}

/// `Ric(G) = min_x Ric(G)_x` over every vertex.
pub fn global_ricci(g: &Graph) -> Result<GlobalCurvature> {
    let all: Vec<usize> = (0..g.num_vertices()).collect();
    ricci_over(g, &all, &CurvatureOptions::default())
}

/// Curvature of a vertex-transitive graph, read off at one vertex.
pub fn global_ricci_transitive(g: &Graph, x: usize) -> Result<GlobalCurvature> {
    ricci_over(g, &[x], &CurvatureOptions::default())
}
