//! Dense symmetric eigensolvers.
//!
//! Two interchangeable solvers sit behind [`EigenSolver`]:
//!
//! * `jacobi`: cyclic sweeps of 2x2 rotations. Slow for large `n` but
//!   unconditionally robust; the default everywhere.
//! * `tridiagonal-ql`: Householder reduction to tridiagonal form followed by
//!   implicit QL with Wilkinson-style shifts. Roughly an order of magnitude
//!   faster on Laplacians with a thousand or more vertices.
//!
//! Solvers are looked up by name through [`eigen_solver`].

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
/// Asymmetry below this is averaged away, above it is rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.a[i * d.len() + i] = v;
        }
        m
    }

    /// Symmetrizes deviations below [`SYMMETRY_TOL`]; larger ones are errors.
    pub fn from_row_major(n: usize, mut a: Vec<f64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Internal(format!(
                "matrix of order {n} needs {} entries, got {}",
                n * n,
                a.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((a[i * n + j] - a[j * n + i]).abs());
            }
        }
        if worst >= SYMMETRY_TOL {
            return Err(Error::Asymmetric(worst));
        }
        if worst > 0.0 {
            for i in 0..n {
                for j in i + 1..n {
                    let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
                    a[i * n + j] = avg;
                    a[j * n + i] = avg;
                }
            }
        }
        Ok(Self { n, a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Internal("matrix rows must be square".into()));
            }
            a.extend_from_slice(r);
        }
        Self::from_row_major(n, a)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Adds `v` to both `(i, j)` and `(j, i)`, once when `i == j`.
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.a[i * n + j] += v;
        if i != j {
            self.a[j * n + i] += v;
        }
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n;
        self.a[i * n + j] = v;
        self.a[j * n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.a.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// `y^T M y`.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            acc += y[i] * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.a[i * n + j] * self.a[i * n + j];
                }
            }
        }
        s.sqrt()
    }

    fn max_abs_diag(&self) -> f64 {
        (0..self.n)
            .map(|i| self.get(i, i).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues in ascending order, with eigenvectors as columns when requested.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl Eigen {
    /// Rebuilds `V diag(values) V^T`; `None` without eigenvectors.
    pub fn reconstruct(&self) -> Option<SymMatrix> {
        let vecs = self.vectors.as_ref()?;
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(vecs) {
            for i in 0..n {
                for j in 0..n {
                    m.a[i * n + j] += lambda * v[i] * v[j];
                }
            }
        }
        Some(m)
    }

    fn sorted(mut values: Vec<f64>, vectors: Option<Vec<Vec<f64>>>) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let vectors = vectors.map(|vs| order.iter().map(|&k| vs[k].clone()).collect());
        values = order.iter().map(|&k| values[k]).collect();
        Self { values, vectors }
    }
}

/// A dense symmetric eigensolver.
pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, m: &SymMatrix, tol: f64, want_vectors: bool) -> Result<Eigen>;
}

/// Cyclic Jacobi rotations.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jacobi;

impl EigenSolver for Jacobi {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn solve(&self, m: &SymMatrix, tol: f64, want_vectors: bool) -> Result<Eigen> {
        let n = m.n;
        let mut a = m.clone();
        let mut v = want_vectors.then(|| SymMatrix::identity(n).a);
        let mut converged = n <= 1;
        for _ in 0..MAX_SWEEPS {
            if a.off_diagonal_norm() < tol * (1.0 + a.max_abs_diag()) {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, v.as_deref_mut(), p, q);
                }
            }
        }
        if !converged && a.off_diagonal_norm() < tol * (1.0 + a.max_abs_diag()) {
            converged = true;
        }
        if !converged {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        let values = (0..n).map(|i| a.get(i, i)).collect();
        let vectors = v.map(|v| {
            (0..n)
                .map(|k| (0..n).map(|i| v[i * n + k]).collect())
                .collect()
        });
        Ok(Eigen::sorted(values, vectors))
    }
}

/// Annihilates `a[p][q]` with one plane rotation.
fn rotate(a: &mut SymMatrix, v: Option<&mut [f64]>, p: usize, q: usize) {
    let n = a.n;
    let apq = a.a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a.a[p * n + p];
    let aqq = a.a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a.a[k * n + p];
        let akq = a.a[k * n + q];
        a.a[k * n + p] = c * akp - s * akq;
        a.a[k * n + q] = s * akp + c * akq;
    }
    let (head, tail) = a.a.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        let apk = row_p[k];
        let aqk = row_q[k];
        row_p[k] = c * apk - s * aqk;
        row_q[k] = s * apk + c * aqk;
    }
    a.a[p * n + p] = app - t * apq;
    a.a[q * n + q] = aqq + t * apq;
    a.a[p * n + q] = 0.0;
    a.a[q * n + p] = 0.0;
    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
        }
    }
}

/// Householder tridiagonalization followed by implicit QL.
#[derive(Clone, Copy, Debug, Default)]
pub struct TridiagonalQl;

impl EigenSolver for TridiagonalQl {
    fn name(&self) -> &'static str {
        "tridiagonal-ql"
    }

    fn solve(&self, m: &SymMatrix, _tol: f64, want_vectors: bool) -> Result<Eigen> {
        let n = m.n;
        if n == 0 {
            return Ok(Eigen {
                values: vec![],
                vectors: want_vectors.then(Vec::new),
            });
        }
        // z holds the accumulated transformation, row-major z[i][j]
        let mut z = m.a.clone();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tred2(n, &mut z, &mut d, &mut e);
        tql2(n, &mut z, &mut d, &mut e)?;
        let vectors = want_vectors.then(|| {
            (0..n)
                .map(|k| (0..n).map(|i| z[i * n + k]).collect())
                .collect()
        });
        Ok(Eigen::sorted(d, vectors))
    }
}

// Householder reduction (EISPACK tred2 lineage). On exit `d` is the diagonal,
// `e[1..]` the subdiagonal, and `z` the orthogonal transformation.
fn tred2(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = z[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = z[idx(i - 1, j)];
                z[idx(i, j)] = 0.0;
                z[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                z[idx(j, i)] = f;
                g = e[j] + z[idx(j, j)] * f;
                for k in j + 1..i {
                    g += z[idx(k, j)] * d[k];
                    e[k] += z[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    z[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = z[idx(i - 1, j)];
                z[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        z[idx(n - 1, i)] = z[idx(i, i)];
        z[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = z[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += z[idx(k, i + 1)] * z[idx(k, j)];
                }
                for k in 0..=i {
                    z[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            z[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = z[idx(n - 1, j)];
        z[idx(n - 1, j)] = 0.0;
    }
    z[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), accumulating into z.
fn tql2(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_ITER: usize = 60;
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        let m = m.min(n - 1);
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NoConvergence(MAX_ITER));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = z[idx(k, i + 1)];
                        z[idx(k, i + 1)] = s * z[idx(k, i)] + c * h;
                        z[idx(k, i)] = c * z[idx(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Registered solver names, default first.
pub const SOLVERS: &[&str] = &["jacobi", "tridiagonal-ql"];

pub fn eigen_solver(name: &str) -> Result<Box<dyn EigenSolver>> {
    match name {
        "jacobi" => Ok(Box::new(Jacobi)),
        "tridiagonal-ql" | "ql" => Ok(Box::new(TridiagonalQl)),
        other => Err(Error::UnknownStrategy {
            kind: "eigensolver",
            name: other.to_string(),
        }),
    }
}

/// Eigenvalues only, via the default Jacobi solver.
pub fn sym_eigen(m: &SymMatrix, tol: f64) -> Result<Eigen> {
    Jacobi.solve(m, tol, false)
}

/// Eigenvalues with orthonormal eigenvectors, via the default Jacobi solver.
pub fn sym_eigen_vectors(m: &SymMatrix, tol: f64) -> Result<Eigen> {
    Jacobi.solve(m, tol, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    // cofactor expansion, independent of both solvers
    fn det(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * rows[0][j] * det(&minor)
            })
            .sum()
    }

    #[test]
    fn small_examples() {
        for name in SOLVERS {
            let s = eigen_solver(name).unwrap();
            let m = SymMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
            assert!(close(
                &s.solve(&m, DEFAULT_TOL, false).unwrap().values,
                &[0.0, 2.0],
                1e-14
            ));
            let m = SymMatrix::identity(3);
            assert!(close(
                &s.solve(&m, DEFAULT_TOL, false).unwrap().values,
                &[1.0; 3],
                1e-14
            ));
            let m = SymMatrix::from_diag(&[5.0, -2.0, 0.0]);
            assert!(close(
                &s.solve(&m, DEFAULT_TOL, false).unwrap().values,
                &[-2.0, 0.0, 5.0],
                1e-14
            ));
            let m = SymMatrix::from_diag(&[7.0]);
            assert_eq!(s.solve(&m, DEFAULT_TOL, true).unwrap().values, vec![7.0]);
        }
    }

    #[test]
    fn symmetrizes_tiny_asymmetry_and_rejects_large() {
        let m = SymMatrix::from_rows(&[vec![1.0, 0.5 + 1e-14], vec![0.5, 1.0]]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(matches!(
            SymMatrix::from_rows(&[vec![1.0, 0.6], vec![0.5, 1.0]]),
            Err(Error::Asymmetric(_))
        ));
    }

    #[test]
    fn unknown_solver() {
        assert!(eigen_solver("lanczos").is_err());
    }

    fn arb_sym(max_n: usize) -> impl Strategy<Value = SymMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |raw| {
                let mut m = SymMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        m.set_sym(i, j, raw[i * n + j]);
                    }
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn reconstruction_and_trace(m in arb_sym(12)) {
            for name in SOLVERS {
                let eig = eigen_solver(name).unwrap().solve(&m, DEFAULT_TOL, true).unwrap();
                let back = eig.reconstruct().unwrap();
                prop_assert!(back.max_abs_diff(&m) < 1e-7, "{} reconstruction {}", name, back.max_abs_diff(&m));
                let sum: f64 = eig.values.iter().sum();
                prop_assert!((sum - m.trace()).abs() <= 1e-8 * (1.0 + m.trace().abs()));
                prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
                let vs = eig.vectors.as_ref().unwrap();
                for a in 0..vs.len() {
                    for b in 0..vs.len() {
                        let dot: f64 = vs[a].iter().zip(&vs[b]).map(|(x, y)| x * y).sum();
                        let want = if a == b { 1.0 } else { 0.0 };
                        prop_assert!((dot - want).abs() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn product_matches_cofactor_determinant(m in arb_sym(4)) {
            let eig = sym_eigen(&m, DEFAULT_TOL).unwrap();
            let prod: f64 = eig.values.iter().product();
            let d = det(&m.rows());
            prop_assert!((prod - d).abs() <= 1e-8 * (1.0 + d.abs()), "{} vs {}", prod, d);
        }

        #[test]
        fn solvers_agree(m in arb_sym(20)) {
            let a = Jacobi.solve(&m, DEFAULT_TOL, false).unwrap().values;
            let b = TridiagonalQl.solve(&m, DEFAULT_TOL, false).unwrap().values;
            prop_assert!(close(&a, &b, 1e-9));
        }
    }
}
