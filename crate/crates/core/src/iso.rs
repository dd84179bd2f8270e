//! Edge boundaries and isoperimetric bounds.
//!
//! For a graph with curvature at least `K != 0` and spectral gap `λ`, every
//! vertex subset `A` satisfies
//! `|∂A| >= ½ min{√λ, λ/√(2|K|)} |A| (1 - |A|/|V|)`. On Bruhat graphs,
//! where `λ >= 2` and `K = 2`, the coefficient simplifies to at least `½`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const EXHAUSTIVE_LIMIT: usize = 20;
pub const SLACK_TOL: f64 = 1e-9;

/// Number of edges with exactly one endpoint in `A`.
pub fn boundary_size(g: &Graph, subset: &[usize]) -> Result<usize> {
    let mut member = vec![false; g.num_vertices()];
    for &v in subset {
        g.check_vertex(v)?;
        member[v] = true;
    }
    Ok(boundary_of_mask(g, &member))
}

fn boundary_of_mask(g: &Graph, member: &[bool]) -> usize {
    g.edges()
        .iter()
        .filter(|(u, v)| member[*u] != member[*v])
        .count()
}

/// `½ min{√λ, λ/√(2|K|)} |A| (1 - |A|/|V|)`.
pub fn iso_bound(size_a: usize, size_v: usize, lambda: f64, k: f64) -> Result<f64> {
    if k == 0.0 || lambda <= 0.0 || !k.is_finite() {
        return Err(Error::BadIsoParameters);
    }
    let coeff = lambda.sqrt().min(lambda / (2.0 * k.abs()).sqrt());
    Ok(0.5 * coeff * volume_factor(size_a, size_v))
}

/// `½ |A| (1 - |A|/|V|)`.
pub fn corollary_bound(size_a: usize, size_v: usize) -> f64 {
    0.5 * volume_factor(size_a, size_v)
}

fn volume_factor(size_a: usize, size_v: usize) -> f64 {
    // |A| (|V| - |A|) / |V|, symmetric under complement
    (size_a * (size_v - size_a)) as f64 / size_v as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetDescriptor {
    Explicit {
        members: Vec<usize>,
    },
    /// Bit `i` of `mask` is vertex `i`.
    Mask {
        mask: u64,
    },
    Uniform {
        seed: u64,
        index: usize,
    },
    Stratified {
        seed: u64,
        size: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub subset: SubsetDescriptor,
    pub size: usize,
    pub boundary: usize,
    pub bound: f64,
    pub corollary_bound: f64,
    /// `|∂A|` minus the larger of the two bounds.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoVerification {
    pub lambda: f64,
    pub k: f64,
    pub checked: usize,
    pub failures: usize,
    pub min_slack: f64,
    pub reports: Vec<IsoReport>,
}

impl IsoVerification {
    pub fn all_pass(&self) -> bool {
        self.failures == 0
    }
}

struct Checker<'g> {
    g: &'g Graph,
    edges: Vec<(usize, usize)>,
    lambda: f64,
    k: f64,
}

impl Checker<'_> {
    fn report(&self, subset: SubsetDescriptor, member: &[bool]) -> Result<IsoReport> {
        let n = self.g.num_vertices();
        let size = member.iter().filter(|&&b| b).count();
        let boundary = self
            .edges
            .iter()
            .filter(|(u, v)| member[*u] != member[*v])
            .count();
        let bound = iso_bound(size, n, self.lambda, self.k)?;
        let corollary = corollary_bound(size, n);
        let slack = boundary as f64 - bound.max(corollary);
        Ok(IsoReport {
            subset,
            size,
            boundary,
            bound,
            corollary_bound: corollary,
            slack,
            pass: slack >= -SLACK_TOL,
        })
    }
}

/// Checks both bounds on every subset (exhaustive) or on seeded random
/// subsets. The sampled mode draws `samples` uniform subsets, then one subset
/// of each size `1..|V|`.
pub fn verify_isoperimetry(
    g: &Graph,
    mode: IsoMode,
    lambda: f64,
    k: f64,
) -> Result<IsoVerification> {
    let n = g.num_vertices();
    iso_bound(0, n.max(1), lambda, k)?;
    let checker = Checker {
        g,
        edges: g.edges(),
        lambda,
        k,
    };
    let mut reports = Vec::new();
    match mode {
        IsoMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::TooManyVertices(n));
            }
            for mask in 0u64..(1u64 << n) {
                let member: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                reports.push(checker.report(SubsetDescriptor::Mask { mask }, &member)?);
            }
        }
        IsoMode::Sampled { seed, samples } => {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            for index in 0..samples {
                let member: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
                reports.push(checker.report(SubsetDescriptor::Uniform { seed, index }, &member)?);
            }
            for size in 1..n {
                let mut member = vec![false; n];
                for v in index::sample(&mut rng, n, size) {
                    member[v] = true;
                }
                reports.push(checker.report(SubsetDescriptor::Stratified { seed, size }, &member)?);
            }
        }
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    let min_slack = reports
        .iter()
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(IsoVerification {
        lambda,
        k,
        checked: reports.len(),
        failures,
        min_slack,
        reports,
    })
}
