//! Finite Coxeter groups as permutation groups on their roots.
//!
//! Element `w` is stored as the permutation `i -> index of w(root_i)`.
//! Products compose as functions: `(u * v)(root) = u(v(root))`, so
//! `(u * v).perm[i] = u.perm[v.perm[i]]`.

use std::collections::HashMap;

use serde::Serialize;

use crate::coxeter::CoxeterMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::roots::{RootPermutation, RootSystem};

pub const ELEMENT_CAP: usize = 100_000;

/// Dense element handle; the identity is always 0.
pub type ElementId = usize;

pub const IDENTITY: ElementId = 0;

#[derive(Clone, Debug)]
pub struct Group {
    rs: RootSystem,
    perms: Vec<RootPermutation>,
    index: HashMap<Vec<u32>, ElementId>,
    simple: Vec<ElementId>,
    reflections: Vec<ElementId>,
    /// Positive root of each reflection, `None` for non-reflections.
    reflection_root: Vec<Option<usize>>,
    length: Vec<usize>,
    /// BFS parent and the generator appended to reach each element.
    parent: Vec<Option<(ElementId, usize)>>,
}

#[derive(Serialize)]
struct GroupExport<'a> {
    order: usize,
    rank: usize,
    simple: &'a [ElementId],
    reflections: &'a [ElementId],
    lengths: &'a [usize],
    edges: Vec<[usize; 2]>,
}

impl Group {
    /// Breadth-first closure of the identity under right multiplication by
    /// the simple reflections.
    pub fn generate(rs: RootSystem) -> Result<Self> {
        let rank = rs.rank();
        let nroots = rs.len();
        let gens: Vec<RootPermutation> = (0..rank)
            .map(|i| rs.reflection_action(rs.simple_index(i)))
            .collect::<Result<_>>()?;
        let identity = RootPermutation((0..nroots as u32).collect());
        let mut perms = vec![identity];
        let mut index = HashMap::new();
        index.insert(key(&perms[0], rank), IDENTITY);
        let mut length = vec![0];
        let mut parent = vec![None];
        let mut head = 0;
        while head < perms.len() {
            for (s, g) in gens.iter().enumerate() {
                let next = perms[head].compose(g);
                let k = key(&next, rank);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                    if perms.len() >= ELEMENT_CAP {
                        return Err(Error::GroupTooLarge(ELEMENT_CAP));
                    }
                    e.insert(perms.len());
                    perms.push(next);
                    length.push(length[head] + 1);
                    parent.push(Some((head, s)));
                }
            }
            head += 1;
        }
        let simple: Vec<ElementId> = gens.iter().map(|g| index[&key(g, rank)]).collect();

        let mut reflections = Vec::with_capacity(rs.num_positive());
        let mut reflection_root = vec![None; perms.len()];
        for alpha in rs.positive_indices() {
            let p = rs.reflection_action(alpha)?;
            let id = *index.get(&key(&p, rank)).ok_or_else(|| {
                Error::Internal(format!("reflection of root {alpha} not in group"))
            })?;
            if reflection_root[id].is_some() {
                return Err(Error::Internal(
                    "two positive roots give the same reflection".into(),
                ));
            }
            if perms[id] != p {
                return Err(Error::Internal(
                    "hash collision on distinct permutations".into(),
                ));
            }
            reflection_root[id] = Some(alpha);
            reflections.push(id);
        }
        reflections.sort_unstable();
        if reflections.len() != rs.num_positive() {
            return Err(Error::Internal(format!(
                "|T| = {} but |positive roots| = {}",
                reflections.len(),
                rs.num_positive()
            )));
        }
        Ok(Self {
            rs,
            perms,
            index,
            simple,
            reflections,
            reflection_root,
            length,
            parent,
        })
    }

    pub fn from_matrix(cm: &CoxeterMatrix) -> Result<Self> {
        Self::generate(RootSystem::generate(cm)?)
    }

    pub fn from_spec(spec: &str) -> Result<Self> {
        Self::from_matrix(&crate::coxeter::parse_input(spec)?)
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn simple(&self) -> &[ElementId] {
        &self.simple
    }

    /// The reflection set `T`, sorted by id.
    pub fn reflections(&self) -> &[ElementId] {
        &self.reflections
    }

    pub fn is_reflection(&self, w: ElementId) -> bool {
        self.reflection_root[w].is_some()
    }

    /// Positive root whose reflection is `w`.
    pub fn root_of(&self, w: ElementId) -> Option<usize> {
        self.reflection_root[w]
    }

    pub fn length(&self, w: ElementId) -> usize {
        self.length[w]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.length
    }

    pub fn perm(&self, w: ElementId) -> &RootPermutation {
        &self.perms[w]
    }

    pub fn lookup(&self, p: &RootPermutation) -> Option<ElementId> {
        self.index.get(&key(p, self.rank())).copied()
    }

    pub fn mult(&self, a: ElementId, b: ElementId) -> ElementId {
        let p = self.perms[a].compose(&self.perms[b]);
        self.lookup(&p).expect("group is closed under composition")
    }

    pub fn inverse(&self, a: ElementId) -> ElementId {
        let p = &self.perms[a];
        let mut inv = vec![0u32; p.len()];
        for (i, &j) in p.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        self.lookup(&RootPermutation(inv))
            .expect("group is closed under inverses")
    }

    pub fn element_order(&self, a: ElementId) -> usize {
        let mut k = 1;
        let mut cur = a;
        while cur != IDENTITY {
            cur = self.mult(cur, a);
            k += 1;
        }
        k
    }

    /// A reduced word for `w` as generator indices, from the BFS tree.
    pub fn word(&self, mut w: ElementId) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length[w]);
        while let Some((p, s)) = self.parent[w] {
            word.push(s);
            w = p;
        }
        word.reverse();
        word
    }

    pub fn label(&self, w: ElementId) -> String {
        if w == IDENTITY {
            return "e".into();
        }
        self.word(w).iter().map(|s| format!("s{}", s + 1)).collect()
    }

    /// Undirected graph with `w ~ t w` for every reflection `t`.
    pub fn bruhat_graph(&self) -> Graph {
        let adj: Vec<Vec<usize>> = (0..self.order())
            .map(|w| self.reflections.iter().map(|&t| self.mult(t, w)).collect())
            .collect();
        Graph::from_adjacency_unchecked(adj)
    }

    /// Cayley graph over the simple reflections (right multiplication).
    pub fn cayley_graph(&self) -> Graph {
        let adj: Vec<Vec<usize>> = (0..self.order())
            .map(|w| self.simple.iter().map(|&s| self.mult(w, s)).collect())
            .collect();
        Graph::from_adjacency_unchecked(adj)
    }

    pub fn length_histogram(&self) -> Vec<usize> {
        let top = self.length.iter().copied().max().unwrap_or(0);
        let mut h = vec![0; top + 1];
        for &l in &self.length {
            h[l] += 1;
        }
        h
    }

    pub fn to_json(&self) -> String {
        let g = self.bruhat_graph();
        serde_json::to_string(&GroupExport {
            order: self.order(),
            rank: self.rank(),
            simple: &self.simple,
            reflections: &self.reflections,
            lengths: &self.length,
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        })
        .expect("plain integers")
    }

    pub fn bruhat_dot(&self, name: &str) -> String {
        let labels = (0..self.order()).map(|w| self.label(w)).collect();
        self.bruhat_graph()
            .with_labels(labels)
            .to_dot(name, Some(&self.length))
    }
}

fn key(p: &RootPermutation, rank: usize) -> Vec<u32> {
    // images of the simple roots determine a linear map
    p.0[..rank].to_vec()
}
