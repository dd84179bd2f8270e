//! Coxeter matrices, type specifications, and the bilinear form of the
//! geometric representation.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};

/// Smallest form eigenvalue above which a matrix counts as finite type.
pub const FINITE_TOLERANCE: f64 = 1e-9;

/// Order of the product of two Coxeter generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bond {
    Finite(u32),
    Infinite,
}

impl Bond {
    /// Serialized encoding, with `0` standing for infinity.
    pub fn encode(self) -> u32 {
        match self {
            Bond::Finite(m) => m,
            Bond::Infinite => 0,
        }
    }

    pub fn decode(raw: u32) -> Self {
        if raw == 0 {
            Bond::Infinite
        } else {
            Bond::Finite(raw)
        }
    }

    /// `-cos(pi / m)`, with the limit value `-1` for an infinite bond.
    pub fn form_entry(self) -> f64 {
        match self {
            Bond::Finite(1) => 1.0,
            Bond::Finite(2) => 0.0,
            Bond::Finite(m) => -(PI / m as f64).cos(),
            Bond::Infinite => -1.0,
        }
    }
}

impl fmt::Display for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bond::Finite(m) => write!(f, "{m}"),
            Bond::Infinite => write!(f, "inf"),
        }
    }
}

/// Symmetric matrix of bond orders `m[i][j]` defining a Coxeter system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    rank: usize,
    m: Vec<Bond>,
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    m: Vec<Vec<u32>>,
}

impl CoxeterMatrix {
    /// Validates and builds a matrix from rows of bonds.
    pub fn new(rows: Vec<Vec<Bond>>) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::InvalidMatrix("rank must be at least 1".into()));
        }
        let mut m = Vec::with_capacity(rank * rank);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {rank}",
                    row.len()
                )));
            }
            m.extend_from_slice(row);
        }
        for i in 0..rank {
            if m[i * rank + i] != Bond::Finite(1) {
                return Err(Error::InvalidMatrix(format!("m[{i}][{i}] must be 1")));
            }
            for j in 0..rank {
                if m[i * rank + j] != m[j * rank + i] {
                    return Err(Error::InvalidMatrix(format!("m[{i}][{j}] != m[{j}][{i}]")));
                }
                if i != j {
                    if let Bond::Finite(v) = m[i * rank + j] {
                        if v < 2 {
                            return Err(Error::InvalidMatrix(format!(
                                "m[{i}][{j}] = {v}, off-diagonal bonds must be >= 2"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { rank, m })
    }

    /// Builds a matrix from raw integers using the `0 = infinity` encoding.
    pub fn from_raw(rows: &[Vec<u32>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Bond::decode(v)).collect())
                .collect(),
        )
    }

    /// Rank-`n` matrix where every pair commutes, then `bonds` applied.
    fn from_bonds(rank: usize, bonds: &[(usize, usize, u32)]) -> Self {
        let mut m = vec![Bond::Finite(2); rank * rank];
        for i in 0..rank {
            m[i * rank + i] = Bond::Finite(1);
        }
        for &(i, j, v) in bonds {
            m[i * rank + j] = Bond::Finite(v);
            m[j * rank + i] = Bond::Finite(v);
        }
        Self { rank, m }
    }

    fn path(rank: usize, orders: &[u32]) -> Self {
        let bonds: Vec<_> = orders
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i + 1, v))
            .collect();
        Self::from_bonds(rank, &bonds)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> Bond {
        self.m[i * self.rank + j]
    }

    pub fn has_infinite_bond(&self) -> bool {
        self.m.contains(&Bond::Infinite)
    }

    pub fn raw_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.get(i, j).encode()).collect())
            .collect()
    }

    /// Block-diagonal product; `self` occupies the leading indices.
    pub fn product(&self, other: &CoxeterMatrix) -> CoxeterMatrix {
        let rank = self.rank + other.rank;
        let mut out = Self::from_bonds(rank, &[]);
        for i in 0..self.rank {
            for j in 0..self.rank {
                out.m[i * rank + j] = self.get(i, j);
            }
        }
        let off = self.rank;
        for i in 0..other.rank {
            for j in 0..other.rank {
                out.m[(i + off) * rank + j + off] = other.get(i, j);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixFile { m: self.raw_rows() }).expect("plain integers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)?;
        Self::from_raw(&file.m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Gram matrix `B[i][j] = -cos(pi / m[i][j])` of the simple roots.
    pub fn bilinear_form(&self) -> BilinearForm {
        let n = self.rank;
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] = self.get(i, j).form_entry();
            }
        }
        BilinearForm { n, b }
    }

    /// Finite-type test through positive-definiteness of the form.
    ///
    /// A matrix with an infinite bond is never finite. Otherwise the smallest
    /// eigenvalue decides: above [`FINITE_TOLERANCE`] is finite, below its
    /// negative is not, and anything in between is reported as a degenerate
    /// (affine) form.
    pub fn is_finite_type(&self) -> Result<bool> {
        if self.has_infinite_bond() {
            return Ok(false);
        }
        let form = self.bilinear_form();
        let eig = linalg::sym_eigen(&form.to_sym(), linalg::DEFAULT_TOL)?;
        let min = eig.values[0];
        if min > FINITE_TOLERANCE {
            Ok(true)
        } else if min >= -FINITE_TOLERANCE {
            Err(Error::DegenerateType(min))
        } else {
            Ok(false)
        }
    }
}

impl fmt::Display for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rank {
            let row: Vec<String> = (0..self.rank).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The bilinear form of the geometric representation on the simple-root basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    n: usize,
    b: Vec<f64>,
}

impl BilinearForm {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.n + j]
    }

    /// `<x, y>` for coordinate vectors over the simple roots.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            let row = &self.b[i * n..(i + 1) * n];
            let mut s = 0.0;
            for j in 0..n {
                s += row[j] * y[j];
            }
            acc += x[i] * s;
        }
        acc
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.b.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn to_sym(&self) -> SymMatrix {
        SymMatrix::from_row_major(self.n, self.b.clone())
            .expect("form is symmetric by construction")
    }
}

/// Parses `atom ("x" atom)*` with atoms `A<k>`, `B<k>`, `D<k>`, `F4`, `H3`,
/// `H4` and `I2(<m>)`.
pub fn parse_spec(text: &str) -> Result<CoxeterMatrix> {
    let err = |reason: String| Error::Parse {
        spec: text.to_string(),
        reason,
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(err("empty specification".into()));
    }
    let mut acc: Option<CoxeterMatrix> = None;
    for atom in split_atoms(trimmed).map_err(err)? {
        let m = parse_atom(atom).map_err(err)?;
        acc = Some(match acc {
            None => m,
            Some(prev) => prev.product(&m),
        });
    }
    acc.ok_or_else(|| err("empty specification".into()))
}

/// Splits on `x` separators that are not inside an `I2(...)` parameter.
fn split_atoms(text: &str) -> std::result::Result<Vec<&str>, String> {
    let mut atoms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parenthesis".into());
                }
            }
            'x' | 'X' if depth == 0 => {
                atoms.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parenthesis".into());
    }
    atoms.push(&text[start..]);
    if atoms.iter().any(|a| a.trim().is_empty()) {
        return Err("malformed product: empty factor".into());
    }
    Ok(atoms.into_iter().map(str::trim).collect())
}

fn parse_atom(atom: &str) -> std::result::Result<CoxeterMatrix, String> {
    let upper = atom.to_ascii_uppercase();
    if let Some(rest) = upper.strip_prefix("I2") {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("malformed dihedral atom `{atom}`, expected I2(m)"))?;
        let m: u32 = inner
            .trim()
            .parse()
            .map_err(|_| format!("bad dihedral parameter `{inner}`"))?;
        if m < 2 {
            return Err(format!("I2 parameter must be >= 2, got {m}"));
        }
        return Ok(CoxeterMatrix::path(2, &[m]));
    }
    match upper.as_str() {
        "F4" => return Ok(CoxeterMatrix::path(4, &[3, 4, 3])),
        "H3" => return Ok(CoxeterMatrix::path(3, &[5, 3])),
        "H4" => return Ok(CoxeterMatrix::path(4, &[5, 3, 3])),
        _ => {}
    }
    let mut chars = upper.chars();
    let family = chars.next().ok_or("empty atom")?;
    let digits = chars.as_str();
    if !matches!(family, 'A' | 'B' | 'D') {
        return Err(format!("unknown atom `{atom}`"));
    }
    let k: usize = digits
        .parse()
        .map_err(|_| format!("unknown atom `{atom}`"))?;
    if k < 1 {
        return Err(format!("rank must be >= 1 in `{atom}`"));
    }
    Ok(match family {
        'A' => CoxeterMatrix::path(k, &vec![3; k - 1]),
        'B' => {
            let mut orders = vec![3; k - 1];
            if let Some(last) = orders.last_mut() {
                *last = 4;
            }
            CoxeterMatrix::path(k, &orders)
        }
        _ => {
            if k < 2 {
                return Err(format!("D needs rank >= 2 in `{atom}`"));
            }
            // path 0..k-2 with node k-1 forked off node k-3
            let mut bonds: Vec<_> = (0..k.saturating_sub(2)).map(|i| (i, i + 1, 3)).collect();
            if k >= 3 {
                bonds.push((k - 3, k - 1, 3));
            }
            CoxeterMatrix::from_bonds(k, &bonds)
        }
    })
}

/// Accepts either a type specification or a path to a JSON matrix file.
pub fn parse_input(text: &str) -> Result<CoxeterMatrix> {
    let path = Path::new(text);
    if text.ends_with(".json") || path.is_file() {
        CoxeterMatrix::from_file(path)
    } else {
        parse_spec(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(spec: &str) -> Vec<Vec<u32>> {
        parse_spec(spec).unwrap().raw_rows()
    }

    #[test]
    fn parses_table_atoms() {
        assert_eq!(raw("A2"), vec![vec![1, 3], vec![3, 1]]);
        assert_eq!(raw("A1xA1"), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(raw("I2(7)"), vec![vec![1, 7], vec![7, 1]]);
        assert_eq!(raw("B3"), vec![vec![1, 3, 2], vec![3, 1, 4], vec![2, 4, 1]]);
        assert_eq!(
            raw("D4"),
            vec![
                vec![1, 3, 2, 2],
                vec![3, 1, 3, 3],
                vec![2, 3, 1, 2],
                vec![2, 3, 2, 1]
            ]
        );
        assert_eq!(raw("H3"), vec![vec![1, 5, 2], vec![5, 1, 3], vec![2, 3, 1]]);
        assert_eq!(raw("F4")[1][2], 4);
        assert_eq!(raw("D2"), raw("A1xA1"));
    }

    #[test]
    fn d3_is_a3_up_to_relabeling() {
        let d3 = parse_spec("D3").unwrap();
        let bonds: Vec<u32> = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| d3.get(i, j).encode())
            .filter(|&v| v == 3)
            .collect();
        assert_eq!(bonds.len(), 2);
    }

    #[test]
    fn products_are_block_diagonal_left_to_right() {
        let m = parse_spec("A1xI2(5)").unwrap();
        assert_eq!(
            m.raw_rows(),
            vec![vec![1, 2, 2], vec![2, 1, 5], vec![2, 5, 1]]
        );
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "", "Z3", "A0", "I2(1)", "I2(x)", "A2x", "xA2", "D1", "I2(3", "B",
        ] {
            assert!(parse_spec(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn bilinear_form_values() {
        let b = parse_spec("A2").unwrap().bilinear_form();
        assert_eq!(b.get(0, 0), 1.0);
        assert_eq!(b.get(0, 1), b.get(1, 0));
        assert!((b.get(0, 1) + 0.5).abs() < 1e-15);
        let b = parse_spec("A1xA1").unwrap().bilinear_form();
        assert_eq!(b.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let inf = CoxeterMatrix::from_raw(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(inf.bilinear_form().get(0, 1), -1.0);
    }

    #[test]
    fn finiteness() {
        assert!(parse_spec("A2").unwrap().is_finite_type().unwrap());
        for m in 2..30 {
            assert!(parse_spec(&format!("I2({m})"))
                .unwrap()
                .is_finite_type()
                .unwrap());
        }
        for spec in ["A4", "B4", "D4", "F4", "H3", "H4", "A1xA2", "D5"] {
            assert!(
                parse_spec(spec).unwrap().is_finite_type().unwrap(),
                "{spec}"
            );
        }
        let inf = CoxeterMatrix::from_raw(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!inf.is_finite_type().unwrap());
    }

    #[test]
    fn affine_and_hyperbolic_forms() {
        // affine A2~: triangle with all bonds 3
        let affine =
            CoxeterMatrix::from_raw(&[vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]]).unwrap();
        assert!(matches!(
            affine.is_finite_type(),
            Err(Error::DegenerateType(_))
        ));
        // hyperbolic triangle (3,3,4)
        let hyp = CoxeterMatrix::from_raw(&[vec![1, 3, 4], vec![3, 1, 3], vec![4, 3, 1]]).unwrap();
        assert!(!hyp.is_finite_type().unwrap());
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(CoxeterMatrix::from_raw(&[vec![1, 3], vec![2, 1]]).is_err());
        assert!(CoxeterMatrix::from_raw(&[vec![2, 3], vec![3, 1]]).is_err());
        assert!(CoxeterMatrix::from_raw(&[vec![1, 1], vec![1, 1]]).is_err());
        assert!(CoxeterMatrix::from_raw(&[]).is_err());
        assert!(CoxeterMatrix::from_raw(&[vec![1, 3]]).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = CoxeterMatrix> {
        (1usize..6).prop_flat_map(|n| {
            proptest::collection::vec(prop_oneof![Just(0u32), 2u32..12], n * (n - 1) / 2).prop_map(
                move |upper| {
                    let mut rows = vec![vec![1u32; n]; n];
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            rows[i][j] = upper[k];
                            rows[j][i] = upper[k];
                            k += 1;
                        }
                    }
                    CoxeterMatrix::from_raw(&rows).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(m in arb_matrix()) {
            prop_assert_eq!(CoxeterMatrix::from_json(&m.to_json()).unwrap(), m);
        }

        #[test]
        fn form_is_symmetric_with_unit_diagonal(m in arb_matrix()) {
            let b = m.bilinear_form();
            for i in 0..b.dim() {
                prop_assert_eq!(b.get(i, i), 1.0);
                for j in 0..b.dim() {
                    prop_assert_eq!(b.get(i, j), b.get(j, i));
                    if i != j {
                        prop_assert!((-1.0..=0.0).contains(&b.get(i, j)));
                    }
                }
            }
        }

        #[test]
        fn infinite_bonds_are_never_finite(m in arb_matrix()) {
            if m.has_infinite_bond() {
                prop_assert!(!m.is_finite_type().unwrap());
            }
        }
    }
}
