//! Root systems of finite Coxeter groups, generated as the orbit of the simple
//! roots under the simple reflections.

#![allow(clippy::needless_range_loop)]

use serde::Serialize;

use crate::coxeter::{BilinearForm, CoxeterMatrix};
use crate::error::{Error, Result};

/// Two roots closer than this (max-norm) are the same root.
pub const DEDUP_TOL: f64 = 1e-6;
/// Distinct roots must be at least this far apart.
pub const SEPARATION_TOL: f64 = 1e-4;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const ROOT_CAP: usize = 10_000;

/// A root, as coordinates over the simple-root basis.
#[derive(Clone, Debug, Serialize)]
pub struct Root {
    pub coords: Vec<f64>,
    pub positive: bool,
}

/// Permutation of root indices induced by a reflection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootPermutation(pub Vec<u32>);

impl RootPermutation {
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` after `other`: index `i` goes to `self(other(i))`.
    pub fn compose(&self, other: &RootPermutation) -> RootPermutation {
        RootPermutation(other.0.iter().map(|&j| self.0[j as usize]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j as usize)
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    cm: CoxeterMatrix,
    form: BilinearForm,
    /// Positive roots at `0..n_pos`, and the negative of root `k` at `k + n_pos`.
    roots: Vec<Root>,
    n_pos: usize,
}

#[derive(Serialize)]
struct RootSystemExport<'a> {
    rank: usize,
    form: Vec<Vec<f64>>,
    roots: &'a [Root],
}

impl RootSystem {
    /// Closes the simple roots under all simple reflections.
    pub fn generate(cm: &CoxeterMatrix) -> Result<Self> {
        if !cm.is_finite_type()? {
            return Err(Error::NotFinite);
        }
        let n = cm.rank();
        let form = cm.bilinear_form();
        let mut found: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let mut head = 0;
        while head < found.len() {
            for i in 0..n {
                let image = simple_reflect(&form, &found[head], i);
                if find_root(&found, &image)?.is_none() {
                    if found.len() >= ROOT_CAP {
                        return Err(Error::RootClosureDiverged(found.len()));
                    }
                    found.push(image);
                }
            }
            head += 1;
        }

        let is_positive = |c: &[f64]| c.iter().all(|&x| x >= -POSITIVITY_TOL);
        let positives: Vec<Vec<f64>> = found.iter().filter(|c| is_positive(c)).cloned().collect();
        let n_pos = positives.len();
        if 2 * n_pos != found.len() {
            return Err(Error::Internal(format!(
                "{} roots but {} positive",
                found.len(),
                n_pos
            )));
        }
        let mut roots: Vec<Root> = positives
            .iter()
            .map(|c| Root {
                coords: c.clone(),
                positive: true,
            })
            .collect();
        for c in &positives {
            let neg: Vec<f64> = c.iter().map(|x| -x).collect();
            if find_root(&found, &neg)?.is_none() || is_positive(&neg) {
                return Err(Error::Internal(
                    "root system not closed under negation".into(),
                ));
            }
            roots.push(Root {
                coords: neg,
                positive: false,
            });
        }
        for r in &roots {
            let norm = form.eval(&r.coords, &r.coords);
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::Internal(format!("root of squared norm {norm}")));
            }
        }
        Ok(Self {
            cm: cm.clone(),
            form,
            roots,
            n_pos,
        })
    }

    pub fn coxeter_matrix(&self) -> &CoxeterMatrix {
        &self.cm
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.cm.rank()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn num_positive(&self) -> usize {
        self.n_pos
    }

    pub fn positive_indices(&self) -> std::ops::Range<usize> {
        0..self.n_pos
    }

    /// Index of `-root(i)`.
    pub fn neg_of(&self, i: usize) -> usize {
        if i < self.n_pos {
            i + self.n_pos
        } else {
            i - self.n_pos
        }
    }

    /// Positive root among `{root(i), -root(i)}`.
    pub fn positive_of(&self, i: usize) -> usize {
        i % self.n_pos
    }

    /// Index of the simple root `i`; simple roots are discovered first.
    pub fn simple_index(&self, i: usize) -> usize {
        i
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.form.eval(&self.roots[i].coords, &self.roots[j].coords)
    }

    pub fn lookup(&self, coords: &[f64]) -> Result<Option<usize>> {
        let mut best = None;
        for (k, r) in self.roots.iter().enumerate() {
            let d = max_dist(&r.coords, coords);
            if d < DEDUP_TOL {
                best = Some(k);
                break;
            }
        }
        Ok(best)
    }

    /// Permutation of root indices induced by the reflection in root `index`.
    pub fn reflection_action(&self, index: usize) -> Result<RootPermutation> {
        let alpha = &self.roots[index].coords;
        let scale = 2.0 / self.form.eval(alpha, alpha);
        let mut perm = Vec::with_capacity(self.roots.len());
        for (b, beta) in self.roots.iter().enumerate() {
            let k = scale * self.form.eval(&beta.coords, alpha);
            let image: Vec<f64> = beta
                .coords
                .iter()
                .zip(alpha)
                .map(|(x, a)| x - k * a)
                .collect();
            let j = self.lookup(&image)?.ok_or(Error::RootNotFound(b))?;
            perm.push(j as u32);
        }
        Ok(RootPermutation(perm))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RootSystemExport {
            rank: self.rank(),
            form: self.form.rows(),
            roots: &self.roots,
        })
        .expect("finite floats")
    }
}

fn simple_reflect(form: &BilinearForm, x: &[f64], i: usize) -> Vec<f64> {
    let n = x.len();
    let mut pairing = 0.0;
    for j in 0..n {
        pairing += x[j] * form.get(j, i);
    }
    let mut out = x.to_vec();
    out[i] -= 2.0 * pairing;
    out
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn find_root(found: &[Vec<f64>], c: &[f64]) -> Result<Option<usize>> {
    let mut hit = None;
    for (k, r) in found.iter().enumerate() {
        let d = max_dist(r, c);
        if d < DEDUP_TOL {
            hit = Some(k);
        } else if d < SEPARATION_TOL {
            return Err(Error::DedupAmbiguity(d));
        }
    }
    Ok(hit)
}
