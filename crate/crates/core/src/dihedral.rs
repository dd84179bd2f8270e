//! Dihedral reflection subgroups attached to the second sphere around the
//! identity of a Bruhat graph.
//!
//! For `u` at distance two from `e`, `G_u` is generated by every reflection
//! that appears in a factorization `u = s t` or `u = t s` with `s, t ∈ T`.
//! Two such elements are equivalent when their subgroups coincide as sets.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ElementId, Group, IDENTITY};

pub const PLANE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionSubgroup {
    /// All reflections of `W` in the subgroup, sorted.
    pub reflections: Vec<ElementId>,
    /// All elements, sorted.
    pub elements: Vec<ElementId>,
    pub order: usize,
    /// `m` when the subgroup is dihedral of order `2m`.
    pub dihedral_m: Option<usize>,
}

impl ReflectionSubgroup {
    /// Closure of `generators` under multiplication.
    pub fn generated_by(grp: &Group, generators: &[ElementId]) -> Self {
        let mut seen: BTreeSet<ElementId> = BTreeSet::from([IDENTITY]);
        let mut frontier = vec![IDENTITY];
        while let Some(w) = frontier.pop() {
            for &g in generators {
                let next = grp.mult(w, g);
                if seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        let elements: Vec<ElementId> = seen.into_iter().collect();
        let reflections: Vec<ElementId> = elements
            .iter()
            .copied()
            .filter(|&w| grp.is_reflection(w))
            .collect();
        let dihedral_m = dihedral_parameter(grp, &elements, &reflections);
        Self {
            order: elements.len(),
            reflections,
            elements,
            dihedral_m,
        }
    }

    pub fn is_dihedral(&self) -> bool {
        self.dihedral_m.is_some()
    }

    pub fn contains(&self, w: ElementId) -> bool {
        self.elements.binary_search(&w).is_ok()
    }

    pub fn contains_reflection(&self, t: ElementId) -> bool {
        self.reflections.binary_search(&t).is_ok()
    }

    /// Elements that are neither reflections nor the identity.
    pub fn nontrivial_rotations(&self) -> Vec<ElementId> {
        self.elements
            .iter()
            .copied()
            .filter(|&w| w != IDENTITY && !self.contains_reflection(w))
            .collect()
    }
}

/// Order `2m`, exactly `m` reflections, and a cyclic rotation part of order
/// `m`. The Klein four-group (`m = 2`) qualifies.
fn dihedral_parameter(
    grp: &Group,
    elements: &[ElementId],
    reflections: &[ElementId],
) -> Option<usize> {
    let m = reflections.len();
    if m < 2 || elements.len() != 2 * m {
        return None;
    }
    let cyclic = elements
        .iter()
        .filter(|&&w| !grp.is_reflection(w))
        .any(|&w| grp.element_order(w) == m);
    cyclic.then_some(m)
}

/// Elements at Bruhat distance exactly two from the identity: products of
/// two distinct reflections.
pub fn sphere2(grp: &Group) -> Vec<ElementId> {
    let t = grp.reflections();
    let mut out = BTreeSet::new();
    for &a in t {
        for &b in t {
            if a != b {
                out.insert(grp.mult(a, b));
            }
        }
    }
    out.into_iter()
        .filter(|&w| w != IDENTITY && !grp.is_reflection(w))
        .collect()
}

/// Reflections `s` with `s t = u` or `t s = u` for some reflection `t`.
fn factor_reflections(grp: &Group, u: ElementId) -> Vec<ElementId> {
    grp.reflections()
        .iter()
        .copied()
        .filter(|&s| grp.is_reflection(grp.mult(s, u)) || grp.is_reflection(grp.mult(u, s)))
        .collect()
}

/// Ordered factorizations `u = t1 t2` with both factors reflections.
pub fn factorizations(grp: &Group, u: ElementId) -> Vec<(ElementId, ElementId)> {
    grp.reflections()
        .iter()
        .filter_map(|&t1| {
            let t2 = grp.mult(t1, u);
            grp.is_reflection(t2).then_some((t1, t2))
        })
        .collect()
}

pub fn g_u(grp: &Group, u: ElementId) -> Result<ReflectionSubgroup> {
    if u == IDENTITY || grp.is_reflection(u) {
        return Err(Error::NotInSphere2(u));
    }
    let gens = factor_reflections(grp, u);
    if gens.is_empty() {
        return Err(Error::NotInSphere2(u));
    }
    Ok(ReflectionSubgroup::generated_by(grp, &gens))
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereClass {
    pub representative: ElementId,
    pub members: Vec<ElementId>,
    pub subgroup: ReflectionSubgroup,
}

/// Partition of the second sphere by equality of `G_u`.
pub fn classes(grp: &Group) -> Result<Vec<SphereClass>> {
    let mut by_subgroup: HashMap<Vec<ElementId>, usize> = HashMap::new();
    let mut out: Vec<SphereClass> = Vec::new();
    for u in sphere2(grp) {
        let sub = g_u(grp, u)?;
        match by_subgroup.get(&sub.elements) {
            Some(&k) => out[k].members.push(u),
            None => {
                by_subgroup.insert(sub.elements.clone(), out.len());
                out.push(SphereClass {
                    representative: u,
                    members: vec![u],
                    subgroup: sub,
                });
            }
        }
    }
    Ok(out)
}

/// Reflections whose positive roots lie in the plane of the roots of
/// `t1` and `t2`, tested through Gram determinants of the bilinear form.
pub fn plane_reflections(grp: &Group, t1: ElementId, t2: ElementId) -> Result<Vec<ElementId>> {
    if t1 == t2 {
        return Err(Error::SameReflection);
    }
    let a1 = grp.root_of(t1).ok_or(Error::NotAReflection(t1))?;
    let a2 = grp.root_of(t2).ok_or(Error::NotAReflection(t2))?;
    let rs = grp.root_system();
    let g12 = rs.inner(a1, a2);
    let det2 = rs.inner(a1, a1) * rs.inner(a2, a2) - g12 * g12;
    if det2 <= PLANE_TOL {
        return Err(Error::Internal("reflection roots are parallel".into()));
    }
    let mut out = Vec::new();
    for &t in grp.reflections() {
        let c = grp.root_of(t).expect("reflection has a root");
        let gram = [
            [rs.inner(a1, a1), g12, rs.inner(a1, c)],
            [g12, rs.inner(a2, a2), rs.inner(a2, c)],
            [rs.inner(a1, c), rs.inner(a2, c), rs.inner(c, c)],
        ];
        if det3(&gram).abs() < PLANE_TOL {
            out.push(t);
        }
    }
    Ok(out)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Subgroup generated by the reflections of all positive roots in the plane
/// spanned by the roots of `t1` and `t2`.
pub fn maximal_dihedral(grp: &Group, t1: ElementId, t2: ElementId) -> Result<ReflectionSubgroup> {
    Ok(ReflectionSubgroup::generated_by(
        grp,
        &plane_reflections(grp, t1, t2)?,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureCheck {
    pub name: &'static str,
    pub pass: bool,
    /// First counterexample, or a summary on success.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub representative: ElementId,
    pub members: Vec<ElementId>,
    pub subgroup_order: usize,
    pub reflections: Vec<ElementId>,
    pub dihedral_m: Option<usize>,
    /// Whether the class is every nontrivial rotation of its subgroup.
    pub all_rotations: bool,
    /// The class holds an involution `u` whose subgroup is dihedral with
    /// `m > 2`, so `G_u` is strictly larger than the Klein group `⟨t, t'⟩` of
    /// a commuting factorization `u = t t'`.
    pub involution_in_larger_dihedral: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub group_order: usize,
    pub reflections: usize,
    pub sphere2_size: usize,
    pub classes: Vec<ClassSummary>,
    pub checks: Vec<StructureCheck>,
    pub notes: Vec<String>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&StructureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn finish(self) -> StructureCheck {
        match self.failure {
            Some(detail) => StructureCheck {
                name: self.name,
                pass: false,
                detail,
            },
            None => StructureCheck {
                name: self.name,
                pass: true,
                detail: format!("{} cases", self.checked),
            },
        }
    }
}

/// Exhaustive verification of the second-sphere structure theory.
pub fn verify_structure(grp: &Group) -> Result<StructureReport> {
    let s2 = sphere2(grp);
    let s2_set: HashSet<ElementId> = s2.iter().copied().collect();
    let cls = classes(grp)?;

    let mut partition = Tally::new("classes_partition_sphere2");
    let covered: usize = cls.iter().map(|c| c.members.len()).sum();
    let distinct: HashSet<ElementId> = cls.iter().flat_map(|c| c.members.iter().copied()).collect();
    partition.record(covered == s2.len() && distinct.len() == s2.len(), || {
        format!(
            "{covered} memberships, {} distinct, sphere has {}",
            distinct.len(),
            s2.len()
        )
    });

    let mut dihedral = Tally::new("g_u_dihedral");
    let mut maximal = Tally::new("g_u_equals_root_plane_subgroup");
    let mut class_rotations = Tally::new("class_is_rotations_in_sphere2");
    let mut class_size = Tally::new("class_size_at_most_rotations");
    let mut bridge = Tally::new("common_neighbours_are_g_u_reflections");
    let mut plane_cache: HashMap<Vec<ElementId>, ReflectionSubgroup> = HashMap::new();

    for c in &cls {
        let sub = &c.subgroup;
        dihedral.record(sub.is_dihedral(), || {
            format!(
                "G_u for u = {} has order {} with {} reflections",
                c.representative,
                sub.order,
                sub.reflections.len()
            )
        });
        let rotations = sub.nontrivial_rotations();
        let in_sphere: Vec<ElementId> = rotations
            .iter()
            .copied()
            .filter(|w| s2_set.contains(w))
            .collect();
        let mut members = c.members.clone();
        members.sort_unstable();
        class_rotations.record(members == in_sphere, || {
            format!(
                "class of {} is {:?}, rotations in sphere are {:?}",
                c.representative, members, in_sphere
            )
        });
        class_size.record(c.members.len() < sub.order / 2, || {
            format!(
                "class of {} has {} members, order {}",
                c.representative,
                c.members.len(),
                sub.order
            )
        });

        for &u in &c.members {
            for (t1, t2) in factorizations(grp, u) {
                let plane = plane_reflections(grp, t1, t2)?;
                let max = plane_cache
                    .entry(plane.clone())
                    .or_insert_with(|| ReflectionSubgroup::generated_by(grp, &plane));
                maximal.record(max.elements == sub.elements, || {
                    format!(
                        "u = {u} = {t1} * {t2}: root-plane subgroup has order {}, G_u {}",
                        max.order, sub.order
                    )
                });
            }
            // B(1,u) ∩ B(1,e) = {t u : t ∈ T} ∩ T
            let common: Vec<ElementId> = grp
                .reflections()
                .iter()
                .map(|&t| grp.mult(t, u))
                .filter(|&w| grp.is_reflection(w))
                .collect();
            let inside = common.iter().all(|&w| sub.contains(w));
            bridge.record(inside && common.len() == sub.reflections.len(), || {
                format!(
                    "u = {u}: {} common neighbours, G_u has {} reflections",
                    common.len(),
                    sub.reflections.len()
                )
            });
        }
    }

    let mut rigidity = Tally::new("two_common_reflections_force_equality");
    for (i, a) in cls.iter().enumerate() {
        for b in &cls[i + 1..] {
            let shared = a
                .subgroup
                .reflections
                .iter()
                .filter(|&&t| b.subgroup.contains_reflection(t))
                .count();
            rigidity.record(shared < 2, || {
                format!(
                    "classes of {} and {} share {shared} reflections but differ",
                    a.representative, b.representative
                )
            });
        }
    }

    let mut pairs = Tally::new("reflection_pair_in_exactly_one_class");
    let t = grp.reflections();
    for (i, &a) in t.iter().enumerate() {
        for &b in &t[i + 1..] {
            let hits = cls
                .iter()
                .filter(|c| c.subgroup.contains_reflection(a) && c.subgroup.contains_reflection(b))
                .count();
            pairs.record(hits == 1, || {
                format!("reflections {a}, {b} lie in {hits} class subgroups")
            });
        }
    }

    let mut notes = Vec::new();
    let summaries: Vec<ClassSummary> = cls
        .iter()
        .map(|c| {
            let sub = &c.subgroup;
            let involutions: Vec<ElementId> =
                c.members.iter().copied().filter(|&u| grp.element_order(u) == 2).collect();
            let larger = !involutions.is_empty() && sub.dihedral_m.is_some_and(|m| m > 2);
            let all_rotations = c.members.len() == sub.order / 2 - 1;
            if larger {
                let u = involutions[0];
                let commuting = factorizations(grp, u)
                    .iter()
                    .filter(|(a, b)| grp.mult(*a, *b) == grp.mult(*b, *a))
                    .count();
                let rotation_order = c
                    .members
                    .iter()
                    .map(|&w| grp.element_order(w))
                    .max()
                    .unwrap_or(2);
                notes.push(format!(
                    "involution {u} = t t' with commuting factors ({commuting} such factorizations): \
                     G_u has order {} with {} reflections, dihedral of type I2({}), not I2(2); \
                     its class ({} members) contains rotations of order {rotation_order}",
                    sub.order,
                    sub.reflections.len(),
                    sub.dihedral_m.unwrap(),
                    c.members.len(),
                ));
            }
            ClassSummary {
                representative: c.representative,
                members: c.members.clone(),
                subgroup_order: sub.order,
                reflections: sub.reflections.clone(),
                dihedral_m: sub.dihedral_m,
                all_rotations,
                involution_in_larger_dihedral: larger,
            }
        })
        .collect();

    Ok(StructureReport {
        group_order: grp.order(),
        reflections: grp.reflections().len(),
        sphere2_size: s2.len(),
        classes: summaries,
        checks: vec![
            partition.finish(),
            dihedral.finish(),
            maximal.finish(),
            class_rotations.finish(),
            class_size.finish(),
            bridge.finish(),
            rigidity.finish(),
            pairs.finish(),
        ],
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DyerReport {
    pub exhaustive: bool,
    pub quadruples: usize,
    pub failures: usize,
    pub first_failure: Option<[ElementId; 4]>,
}

impl DyerReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Above this many `(t1, t2, t3)` triples the check samples instead.
pub const DYER_EXHAUSTIVE_LIMIT: usize = 50_000;

/// Whenever `t1 t2 = t3 t4 != e` for reflections, `⟨t1, t2, t3, t4⟩` must be
/// dihedral. Exhaustive for small reflection sets, otherwise `samples`
/// random `(t1, t2, t3)` with `t4` solved for.
pub fn verify_lemma_dyer(grp: &Group, samples: usize, seed: u64) -> DyerReport {
    let t = grp.reflections();
    let n = t.len();
    let exhaustive = n * n * n <= DYER_EXHAUSTIVE_LIMIT;
    let mut cache: BTreeMap<Vec<ElementId>, bool> = BTreeMap::new();
    let mut quadruples = 0;
    let mut failures = 0;
    let mut first_failure = None;
    let mut check = |t1: ElementId, t2: ElementId, t3: ElementId| {
        let u = grp.mult(t1, t2);
        if u == IDENTITY {
            return;
        }
        let t4 = grp.mult(t3, u);
        if !grp.is_reflection(t4) {
            return;
        }
        quadruples += 1;
        let mut gens = vec![t1, t2, t3, t4];
        gens.sort_unstable();
        gens.dedup();
        let ok = *cache
            .entry(gens.clone())
            .or_insert_with(|| ReflectionSubgroup::generated_by(grp, &gens).is_dihedral());
        if !ok {
            failures += 1;
            first_failure.get_or_insert([t1, t2, t3, t4]);
        }
    };
    if exhaustive {
        for &a in t {
            for &b in t {
                for &c in t {
                    check(a, b, c);
                }
            }
        }
    } else {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..samples {
            let (a, b, c) = (
                t[rng.gen_range(0..n)],
                t[rng.gen_range(0..n)],
                t[rng.gen_range(0..n)],
            );
            check(a, b, c);
        }
    }
    DyerReport {
        exhaustive,
        quadruples,
        failures,
        first_failure,
    }
}
