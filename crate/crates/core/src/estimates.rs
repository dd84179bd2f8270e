//! The two quadratic estimates behind `Ric(B(W)) >= 2`, evaluated on explicit
//! functions with `f(e) = 0`.
//!
//! For `u` in the second sphere the inner sums run over the common
//! neighbours `v ∈ B(1,u) ∩ B(1,e)`, which are reflections.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::dihedral::{classes, SphereClass};
use crate::error::{Error, Result};
use crate::group::{ElementId, Group, IDENTITY};

pub const ESTIMATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateValue {
    pub lhs: f64,
    pub rhs: f64,
}

impl EstimateValue {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Precomputed second-sphere data for repeated evaluation.
/// Class members with their common neighbours, and the subgroup reflections.
type ClassPairs = (Vec<(ElementId, Vec<ElementId>)>, Vec<ElementId>);

pub struct EstimateContext {
    reflections: Vec<ElementId>,
    /// Per class: members with their common neighbours, and the reflections
    /// of the class subgroup.
    classes: Vec<ClassPairs>,
}

impl EstimateContext {
    pub fn new(grp: &Group) -> Result<Self> {
        let cls = classes(grp)?;
        Ok(Self::from_classes(grp, &cls))
    }

    pub fn from_classes(grp: &Group, cls: &[SphereClass]) -> Self {
        let classes = cls
            .iter()
            .map(|c| {
                let members = c
                    .members
                    .iter()
                    .map(|&u| {
                        let common: Vec<ElementId> = grp
                            .reflections()
                            .iter()
                            .map(|&t| grp.mult(t, u))
                            .filter(|&w| grp.is_reflection(w))
                            .collect();
                        (u, common)
                    })
                    .collect();
                (members, c.subgroup.reflections.clone())
            })
            .collect();
        Self {
            reflections: grp.reflections().to_vec(),
            classes,
        }
    }

    fn check_base(f: &[f64]) -> Result<()> {
        match f.get(IDENTITY) {
            Some(&0.0) => Ok(()),
            Some(&v) => Err(Error::NonzeroBase(v)),
            None => Err(Error::MissingValue(IDENTITY)),
        }
    }

    /// Per class `U` with `n` reflections in `G_U`:
    /// `Σ_{u∈U} Σ_v (f(u) - 2f(v))² >= |U| (4/n) Σ_{i<j} (f(t_i) - f(t_j))²`.
    /// On a dihedral group there is a single class of `n - 1` rotations and
    /// the right side is `(4/n)(n-1) Σ_{i<j} (f(s_i) - f(s_j))²`.
    pub fn dihedral(&self, f: &[f64]) -> Result<EstimateValue> {
        Self::check_base(f)?;
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (members, refl) in &self.classes {
            for (u, common) in members {
                lhs += common
                    .iter()
                    .map(|&v| (f[*u] - 2.0 * f[v]).powi(2))
                    .sum::<f64>();
            }
            let n = refl.len() as f64;
            rhs += members.len() as f64 * 4.0 / n * pair_sum(f, refl);
        }
        Ok(EstimateValue { lhs, rhs })
    }

    /// `Σ_{u∈B(2,e)} Σ_v ½ (f(u) - 2f(v))² >= Σ_{{v,v'} ⊆ B(1,e)} (f(v) - f(v'))²`,
    /// the right side over unordered pairs.
    pub fn general(&self, f: &[f64]) -> Result<EstimateValue> {
        Self::check_base(f)?;
        let lhs = self
            .classes
            .iter()
            .flat_map(|(members, _)| members)
            .map(|(u, common)| {
                common
                    .iter()
                    .map(|&v| 0.5 * (f[*u] - 2.0 * f[v]).powi(2))
                    .sum::<f64>()
            })
            .sum();
        Ok(EstimateValue {
            lhs,
            rhs: pair_sum(f, &self.reflections),
        })
    }
}

fn pair_sum(f: &[f64], vs: &[ElementId]) -> f64 {
    let mut s = 0.0;
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            s += (f[a] - f[b]).powi(2);
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateSummary {
    pub functions: usize,
    pub failures: usize,
    pub min_slack: f64,
    /// Smallest `lhs / rhs` over functions with `rhs > 0`.
    pub min_ratio: f64,
}

impl EstimateSummary {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub seed: u64,
    pub dihedral: EstimateSummary,
    pub general: EstimateSummary,
}

impl EstimateReport {
    pub fn pass(&self) -> bool {
        self.dihedral.pass() && self.general.pass()
    }
}

struct Accumulator {
    functions: usize,
    failures: usize,
    min_slack: f64,
    min_ratio: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            functions: 0,
            failures: 0,
            min_slack: f64::INFINITY,
            min_ratio: f64::INFINITY,
        }
    }

    fn add(&mut self, v: EstimateValue) {
        self.functions += 1;
        let slack = v.slack();
        if slack < -ESTIMATE_TOL {
            self.failures += 1;
        }
        self.min_slack = self.min_slack.min(slack);
        if v.rhs > 0.0 {
            self.min_ratio = self.min_ratio.min(v.lhs / v.rhs);
        }
    }

    fn finish(self) -> EstimateSummary {
        EstimateSummary {
            functions: self.functions,
            failures: self.failures,
            min_slack: self.min_slack,
            min_ratio: self.min_ratio,
        }
    }
}

/// Evaluates both estimates on `functions` random `f` with values uniform in
/// `[-1, 1]` and `f(e) = 0`.
pub fn verify_estimates(grp: &Group, functions: usize, seed: u64) -> Result<EstimateReport> {
    verify_with_context(&EstimateContext::new(grp)?, grp.order(), functions, seed)
}

/// As [`verify_estimates`], on a group of `order` elements whose second
/// sphere is already described by `ctx`.
pub fn verify_with_context(
    ctx: &EstimateContext,
    order: usize,
    functions: usize,
    seed: u64,
) -> Result<EstimateReport> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut dihedral = Accumulator::new();
    let mut general = Accumulator::new();
    let mut f = vec![0.0; order];
    for _ in 0..functions {
        for (w, slot) in f.iter_mut().enumerate() {
            *slot = if w == IDENTITY {
                0.0
            } else {
                rng.gen_range(-1.0..=1.0)
            };
        }
        dihedral.add(ctx.dihedral(&f)?);
        general.add(ctx.general(&f)?);
    }
    Ok(EstimateReport {
        seed,
        dihedral: dihedral.finish(),
        general: general.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i2_3_by_hand() {
        // W = I2(3): T = {a, b, c}, B(2,e) = {ρ, ρ²}, each adjacent to all of T
        let g = Group::from_spec("I2(3)").unwrap();
        let ctx = EstimateContext::new(&g).unwrap();
        let mut f = vec![0.0; 6];
        for (k, &t) in g.reflections().iter().enumerate() {
            f[t] = [1.0, 0.0, -1.0][k];
        }
        // f = 0 on rotations: Σ_u Σ_v 4 f(v)² = 2 · 4 · 2
        let d = ctx.dihedral(&f).unwrap();
        assert!((d.lhs - 16.0).abs() < 1e-12);
        // (4/3) · 2 · (1 + 4 + 1)
        assert!((d.rhs - 16.0).abs() < 1e-12);
        let gen = ctx.general(&f).unwrap();
        assert!((gen.lhs - 8.0).abs() < 1e-12);
        assert!((gen.rhs - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonzero_base() {
        let g = Group::from_spec("A2").unwrap();
        let ctx = EstimateContext::new(&g).unwrap();
        assert!(matches!(ctx.general(&[1.0; 6]), Err(Error::NonzeroBase(_))));
    }

    #[test]
    fn random_functions_satisfy_both() {
        for spec in ["I2(4)", "A2", "A3"] {
            let r = verify_estimates(&Group::from_spec(spec).unwrap(), 200, 3).unwrap();
            assert!(r.pass(), "{spec}: {r:?}");
            assert_eq!(r.general.functions, 200);
        }
    }
}
