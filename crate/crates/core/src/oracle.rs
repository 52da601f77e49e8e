//! Hochschild cohomology dimensions from the normalized bar complex.
//!
//! Cochains are taken relative to the vertex subalgebra `E`: a cochain of
//! degree `k` assigns to each composable tuple `(b_1, ..., b_k)` of radical
//! monomials an element of `e_{s(b_1)} Λ e_{t(b_k)}`. The differential is the
//! standard one. It preserves the weight `deg(output) - Σ deg(b_i)`, so
//! ranks are computed block by block.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraTable;
use crate::cochain::CochainComplex;
use crate::exactla::{ExactMatrix, FieldSpec, Scalar};

/// Default cap on `(dim Λ̄)^{k+1} · dim Λ`.
pub const DEFAULT_BUDGET: u64 = 500_000;

/// Prime used for the fast screen before rational ranks.
const SCREEN_PRIME: u64 = 2_147_483_647;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("budget exceeded at degree {degree}")]
    BudgetExceeded { degree: usize },
}

type Key = i64;

struct Cochains {
    /// Blocks keyed by weight; entries are (tuple, output).
    blocks: BTreeMap<Key, Vec<(Vec<usize>, usize)>>,
}

pub struct BarComplex<'a> {
    t: &'a AlgebraTable,
    radical: Vec<usize>,
    spaces: Vec<Cochains>,
}

impl<'a> BarComplex<'a> {
    /// Cochain spaces `C^0..=C^top`.
    pub fn new(t: &'a AlgebraTable, top: usize) -> Self {
        let radical: Vec<usize> = (0..t.dim()).filter(|&b| t.basis[b].degree > 0).collect();
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        let mut spaces = Vec::with_capacity(top + 1);
        for k in 0..=top {
            if k > 0 {
                tuples = tuples
                    .iter()
                    .flat_map(|tu| {
                        radical
                            .iter()
                            .filter(move |&&b| tu.last().is_none_or(|&l| t.basis[l].target == t.basis[b].source))
                            .map(move |&b| {
                                let mut v = tu.clone();
                                v.push(b);
                                v
                            })
                    })
                    .collect();
            }
            let mut blocks: BTreeMap<Key, Vec<(Vec<usize>, usize)>> = BTreeMap::new();
            for tu in &tuples {
                let inner: i64 = tu.iter().map(|&b| t.basis[b].degree as i64).sum();
                let ends: Vec<(usize, usize)> = if tu.is_empty() {
                    (1..=t.n()).map(|v| (v, v)).collect()
                } else {
                    vec![(t.basis[tu[0]].source, t.basis[*tu.last().unwrap()].target)]
                };
                for (s, e) in ends {
                    for &m in t.ids_between(s, e) {
                        let w = t.basis[m].degree as i64 - inner;
                        blocks.entry(w).or_default().push((tu.clone(), m));
                    }
                }
            }
            spaces.push(Cochains { blocks });
        }
        Self { t, radical, spaces }
    }

    pub fn reduced_dim(&self) -> usize {
        self.radical.len()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.spaces[k].blocks.values().map(Vec::len).sum()
    }

    /// The block of `d^k: C^k -> C^{k+1}` with the given key, over `field`.
    pub fn block_matrix(&self, k: usize, key: Key, field: FieldSpec) -> ExactMatrix {
        let t = self.t;
        let empty = Vec::new();
        let rows = self.spaces[k + 1].blocks.get(&key).unwrap_or(&empty);
        let cols = self.spaces[k].blocks.get(&key).unwrap_or(&empty);
        let mut m = ExactMatrix::zeros(field, rows.len(), cols.len());
        if rows.is_empty() || cols.is_empty() {
            return m;
        }
        let col_index: HashMap<(&[usize], usize), usize> =
            cols.iter().enumerate().map(|(i, (tu, o))| ((tu.as_slice(), *o), i)).collect();
        let mut add = |r: usize, tu: &[usize], o: usize, s: i64| {
            if let Some(&c) = col_index.get(&(tu, o)) {
                m.add_at(r, c, &field.from_i64(s));
            }
        };
        for (r, (tu, out)) in rows.iter().enumerate() {
            let len = tu.len();
            for (_, o) in cols.iter().filter(|(ct, _)| ct.as_slice() == &tu[1..]) {
                if let Some((s, p)) = t.mul_basis(tu[0], *o) {
                    if p == *out {
                        add(r, &tu[1..], *o, s as i64);
                    }
                }
            }
            for i in 0..len - 1 {
                if let Some((s, p)) = t.mul_basis(tu[i], tu[i + 1]) {
                    let mut merged = tu[..i].to_vec();
                    merged.push(p);
                    merged.extend_from_slice(&tu[i + 2..]);
                    let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
                    add(r, &merged, *out, sign * s as i64);
                }
            }
            let sign = if len % 2 == 0 { 1 } else { -1 };
            for (_, o) in cols.iter().filter(|(ct, _)| ct.as_slice() == &tu[..len - 1]) {
                if let Some((s, p)) = t.mul_basis(*o, tu[len - 1]) {
                    if p == *out {
                        add(r, &tu[..len - 1], *o, sign * s as i64);
                    }
                }
            }
        }
        m
    }

    fn keys(&self, k: usize) -> Vec<Key> {
        let mut keys: Vec<Key> = self.spaces[k].blocks.keys().copied().collect();
        keys.retain(|key| self.spaces[k + 1].blocks.contains_key(key));
        keys
    }

    /// `rank d^k` over `field`.
    pub fn rank(&self, k: usize, field: FieldSpec) -> usize {
        self.keys(k)
            .par_iter()
            .map(|&key| self.block_matrix(k, key, field).rank())
            .sum()
    }

    /// Whether `d^{k+1} ∘ d^k = 0` on every block, checked over `field`.
    pub fn squares_to_zero(&self, k: usize, field: FieldSpec) -> bool {
        self.spaces[k].blocks.keys().all(|&key| {
            let a = self.block_matrix(k, key, field);
            let b = self.block_matrix(k + 1, key, field);
            a.rows() == 0 || b.rows() == 0 || b.mul(&a).is_zero()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarDims {
    pub dims: Vec<usize>,
    /// Ranks over the screening prime, when a rational run was screened first.
    pub screen_ranks: Option<Vec<usize>>,
    pub ranks: Vec<usize>,
    pub squares_to_zero: bool,
}

/// Checks the budget `(dim Λ̄)^{k+1} · dim Λ <= budget` for `k <= upto`.
pub fn check_budget(t: &AlgebraTable, upto: usize, budget: u64) -> Result<(), OracleError> {
    let reduced = (t.dim() - t.n()) as u64;
    for k in 0..=upto {
        let size = reduced
            .checked_pow(k as u32 + 1)
            .and_then(|v| v.checked_mul(t.dim() as u64));
        if size.is_none_or(|s| s > budget) {
            return Err(OracleError::BudgetExceeded { degree: k });
        }
    }
    Ok(())
}

/// `dim HH^k` for `k = 0..=upto`.
pub fn bar_dims(t: &AlgebraTable, upto: usize, budget: u64) -> Result<BarDims, OracleError> {
    check_budget(t, upto, budget)?;
    let bar = BarComplex::new(t, upto + 1);
    let field = t.field;
    let screen = FieldSpec::new(SCREEN_PRIME).expect("screening prime");
    let screen_ranks: Option<Vec<usize>> = field
        .is_rational()
        .then(|| (0..=upto).map(|k| bar.rank(k, screen)).collect());
    let ranks: Vec<usize> = (0..=upto).map(|k| bar.rank(k, field)).collect();
    let dims = (0..=upto)
        .map(|k| bar.dim(k) - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] })
        .collect();
    let squares_to_zero = (0..upto).all(|k| bar.squares_to_zero(k, field));
    Ok(BarDims {
        dims,
        screen_ranks,
        ranks,
        squares_to_zero,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleComparison {
    pub upto: usize,
    pub bar: Vec<usize>,
    pub resolution: Vec<usize>,
    pub mismatches: Vec<usize>,
    pub squares_to_zero: bool,
}

impl OracleComparison {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.squares_to_zero
    }
}

fn mismatches(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y).map(|(i, _)| i).collect()
}

pub fn compare(t: &AlgebraTable, c: &CochainComplex, upto: usize, budget: u64) -> Result<OracleComparison, OracleError> {
    let bar = bar_dims(t, upto, budget)?;
    let resolution = c.hh_dims(upto);
    Ok(OracleComparison {
        upto,
        mismatches: mismatches(&bar.dims, &resolution),
        bar: bar.dims,
        resolution,
        squares_to_zero: bar.squares_to_zero,
    })
}

/// The differential leaving `degree` plus the rank-one term `u e_j^T`, where
/// `j` lies in the support of a kernel vector and `u` is outside the
/// image. This raises the rank by exactly one; when no such pair exists
/// the map is replaced by zero instead.
pub fn perturbed_differential(c: &CochainComplex, degree: usize) -> ExactMatrix {
    let d = c.differential(degree);
    let field = c.field();
    let rank = d.rank();
    let j = d
        .kernel_basis()
        .first()
        .and_then(|k| k.iter().position(|x| !x.is_zero()));
    let u = (0..d.rows()).find(|&r| {
        let mut cols: Vec<Vec<Scalar>> = (0..d.cols()).map(|k| d.column(k)).collect();
        let mut e = vec![field.zero(); d.rows()];
        e[r] = field.one();
        cols.push(e);
        ExactMatrix::from_columns(field, d.rows(), &cols).rank() > rank
    });
    let mut m = d.clone();
    match (j, u) {
        (Some(j), Some(r)) => m.add_at(r, j, &field.one()),
        _ => m = ExactMatrix::zeros(field, d.rows(), d.cols()),
    }
    m
}

/// Resolution dimensions with the differential leaving `degree` perturbed.
pub fn perturbed_dims(c: &CochainComplex, degree: usize, upto: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=upto)
        .map(|i| if i == degree { perturbed_differential(c, i).rank() } else { c.rank(i) })
        .collect();
    (0..=upto)
        .map(|i| c.dim(i) - ranks[i] - if i == 0 { 0 } else { ranks[i - 1] })
        .collect()
}

/// Compares the oracle against a deliberately broken resolution complex.
pub fn negative_control(t: &AlgebraTable, c: &CochainComplex, degree: usize, upto: usize, budget: u64) -> Result<OracleComparison, OracleError> {
    let bar = bar_dims(t, upto, budget)?;
    let resolution = perturbed_dims(c, degree, upto);
    Ok(OracleComparison {
        upto,
        mismatches: mismatches(&bar.dims, &resolution),
        bar: bar.dims,
        resolution,
        squares_to_zero: bar.squares_to_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::nakayama::associated_form;
    use crate::resolution::Resolution;
    use std::sync::Arc;

    fn complex(n: usize) -> (Arc<AlgebraTable>, CochainComplex) {
        let t = Arc::new(build_algebra(n, FieldSpec::rationals()).unwrap());
        let f = associated_form(&t).unwrap();
        let c = CochainComplex::new(Arc::new(Resolution::new(t.clone(), &f))).unwrap();
        (t, c)
    }

    #[test]
    fn one_vertex_window() {
        let (t, c) = complex(1);
        let bar = bar_dims(&t, 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(bar.dims, vec![2, 1, 1, 1, 1, 1, 1]);
        assert!(compare(&t, &c, 6, DEFAULT_BUDGET).unwrap().pass());
    }

    #[test]
    fn degree_zero_is_center() {
        let (t, _) = complex(2);
        let bar = bar_dims(&t, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(bar.dims[0], t.center_dimension());
    }

    #[test]
    fn budget_guard() {
        let t = build_algebra(3, FieldSpec::rationals()).unwrap();
        assert_eq!(bar_dims(&t, 5, 1000), Err(OracleError::BudgetExceeded { degree: 1 }));
    }

    #[test]
    fn perturbation_is_detected() {
        let (t, c) = complex(1);
        let r = negative_control(&t, &c, 1, 4, DEFAULT_BUDGET).unwrap();
        assert!(r.mismatches.contains(&1));
        let (t, c) = complex(2);
        let r = negative_control(&t, &c, 0, 2, DEFAULT_BUDGET).unwrap();
        assert!(r.mismatches.contains(&0));
    }
}
