//! The period-6 minimal projective bimodule resolution of `Λ`.
//!
//! Terms are `P = ⊕_i Λe_i ⊗ e_iΛ` and `Q = ⊕_a Λe_{i(a)} ⊗ e_{t(a)}Λ`;
//! `P^{-m}` is `Q` when `m ≡ 1 (mod 3)` and `P` otherwise. The
//! differentials cycle through `δ, R, k, δ_τ, R_τ, k_τ`, where the twisted
//! maps come from the untwisted ones by `x ⊗ y ↦ x ⊗ τ^{-1}(y)` and `τ`
//! negates arrows.
//!
//! A bimodule map is stored by its values on the generators `e_s ⊗ e_t`.
//! As a vector space each term splits into blocks indexed by the corner
//! `(a, b)` (left factor starts at `a`, right factor ends at `b`) and the
//! internal degree; the differentials are homogeneous, so every rank and
//! every lifting system decomposes along these blocks.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraTable, Vertex};
use crate::exactla::{ExactMatrix, Scalar};
use crate::nakayama::NakayamaForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TermKind {
    P,
    Q,
}

/// Kind of `P^{-m}`.
pub fn term_kind(m: usize) -> TermKind {
    if m % 3 == 1 {
        TermKind::Q
    } else {
        TermKind::P
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiffKind {
    Delta,
    R,
    K,
}

/// Which map `d^{-m}` is: base kind and whether it is twisted.
pub fn diff_pattern(m: usize) -> (DiffKind, bool) {
    assert!(m >= 1);
    let r = (m - 1) % 6;
    let kind = [DiffKind::Delta, DiffKind::R, DiffKind::K][r % 3];
    (kind, r >= 3)
}

pub fn summands(t: &AlgebraTable, kind: TermKind) -> Vec<(Vertex, Vertex)> {
    match kind {
        TermKind::P => (1..=t.n()).map(|i| (i, i)).collect(),
        TermKind::Q => t.quiver.arrows.iter().map(|a| (a.source, a.target)).collect(),
    }
}

/// Key of a basis vector `left ⊗_summand right` of a projective term.
pub type TensorKey = (usize, usize, usize);

/// Sparse element of a projective term, keyed by `(summand, left, right)`.
pub type PElem = BTreeMap<TensorKey, Scalar>;

pub fn add_into(e: &mut PElem, key: TensorKey, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match e.get_mut(&key) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                e.remove(&key);
            }
        }
        None => {
            e.insert(key, c.clone());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTerm {
    pub coeff: Scalar,
    pub summand: usize,
    pub left: usize,
    pub right: usize,
}

/// A morphism between projective bimodules, given by its values on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleMap {
    pub source: TermKind,
    pub target: TermKind,
    pub values: Vec<Vec<MapTerm>>,
}

impl BimoduleMap {
    /// `x ⊗ y ↦ x ⊗ τ^{-1}(y)` on every value term.
    pub fn tau_twist(&self, t: &AlgebraTable) -> BimoduleMap {
        let mut out = self.clone();
        for terms in &mut out.values {
            for term in terms {
                if t.basis[term.right].degree % 2 == 1 {
                    term.coeff = -&term.coeff;
                }
            }
        }
        out
    }

    /// Image of the basis vector `x ⊗_{summand} y`.
    pub fn apply_basis(&self, t: &AlgebraTable, key: TensorKey, out: &mut PElem, scale: &Scalar) {
        let (rho, x, y) = key;
        for term in &self.values[rho] {
            let Some((s1, l)) = t.mul_basis(x, term.left) else {
                continue;
            };
            let Some((s2, r)) = t.mul_basis(term.right, y) else {
                continue;
            };
            let mut c = &term.coeff * scale;
            if s1 * s2 < 0 {
                c = -c;
            }
            add_into(out, (term.summand, l, r), &c);
        }
    }

    pub fn apply(&self, t: &AlgebraTable, e: &PElem) -> PElem {
        let mut out = PElem::new();
        for (key, c) in e {
            self.apply_basis(t, *key, &mut out, c);
        }
        out
    }

    /// Image of the generator of summand `sigma`.
    pub fn on_generator(&self, sigma: usize) -> PElem {
        let mut out = PElem::new();
        for term in &self.values[sigma] {
            add_into(&mut out, (term.summand, term.left, term.right), &term.coeff);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, t: &AlgebraTable, other: &BimoduleMap) -> BimoduleMap {
        let values = (0..other.values.len())
            .map(|sigma| {
                let img = self.apply(t, &other.on_generator(sigma));
                img.into_iter()
                    .map(|((summand, left, right), coeff)| MapTerm {
                        coeff,
                        summand,
                        left,
                        right,
                    })
                    .collect()
            })
            .collect();
        BimoduleMap {
            source: other.source,
            target: self.target,
            values,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|t| t.coeff.is_zero()))
    }

    /// Every value term has a factor of positive degree.
    pub fn is_radical(&self, t: &AlgebraTable) -> bool {
        self.values.iter().flatten().all(|term| {
            term.coeff.is_zero() || t.basis[term.left].degree + t.basis[term.right].degree > 0
        })
    }
}

/// Vector-space layout of a projective term: blocks by corner and degree.
#[derive(Debug, Clone)]
pub struct TermLayout {
    pub kind: TermKind,
    pub summands: Vec<(Vertex, Vertex)>,
    pub blocks: BTreeMap<(Vertex, Vertex, usize), Vec<TensorKey>>,
    pub index: HashMap<TensorKey, usize>,
    pub dim: usize,
}

impl TermLayout {
    pub fn new(t: &AlgebraTable, kind: TermKind) -> Self {
        let summands = summands(t, kind);
        let mut blocks: BTreeMap<(Vertex, Vertex, usize), Vec<TensorKey>> = BTreeMap::new();
        let mut dim = 0;
        for (rho, &(p, q)) in summands.iter().enumerate() {
            for l in t.ids_into(p) {
                for r in t.ids_from(q) {
                    let key = (t.basis[l].source, t.basis[r].target, t.basis[l].degree + t.basis[r].degree);
                    blocks.entry(key).or_default().push((rho, l, r));
                    dim += 1;
                }
            }
        }
        let mut index = HashMap::new();
        for keys in blocks.values() {
            for (k, key) in keys.iter().enumerate() {
                index.insert(*key, k);
            }
        }
        Self {
            kind,
            summands,
            blocks,
            index,
            dim,
        }
    }

    pub fn block(&self, a: Vertex, b: Vertex, d: usize) -> &[TensorKey] {
        self.blocks.get(&(a, b, d)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn block_of(&self, t: &AlgebraTable, key: TensorKey) -> (Vertex, Vertex, usize) {
        let (_, l, r) = key;
        (t.basis[l].source, t.basis[r].target, t.basis[l].degree + t.basis[r].degree)
    }
}

/// The resolution as an infinite periodic window.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub algebra: Arc<AlgebraTable>,
    base: Vec<BimoduleMap>,
    layout_p: TermLayout,
    layout_q: TermLayout,
}

impl Resolution {
    /// Requires the dual basis, hence a certified form, for `k`.
    pub fn new(t: Arc<AlgebraTable>, f: &NakayamaForm) -> Self {
        let delta = delta_map(&t);
        let r = r_map(&t);
        let k = k_map(&t, f);
        let base = vec![
            delta.clone(),
            r.clone(),
            k.clone(),
            delta.tau_twist(&t),
            r.tau_twist(&t),
            k.tau_twist(&t),
        ];
        let layout_p = TermLayout::new(&t, TermKind::P);
        let layout_q = TermLayout::new(&t, TermKind::Q);
        Self {
            algebra: t,
            base,
            layout_p,
            layout_q,
        }
    }

    pub fn algebra(&self) -> &AlgebraTable {
        &self.algebra
    }

    /// `d^{-m}: P^{-m} -> P^{-m+1}` for `m >= 1`.
    pub fn differential(&self, m: usize) -> &BimoduleMap {
        &self.base[(m - 1) % 6]
    }

    pub fn layout(&self, kind: TermKind) -> &TermLayout {
        match kind {
            TermKind::P => &self.layout_p,
            TermKind::Q => &self.layout_q,
        }
    }

    pub fn term(&self, m: usize) -> &TermLayout {
        self.layout(term_kind(m))
    }

    /// Internal degree raised by `d^{-m}`.
    pub fn shift(&self, m: usize) -> usize {
        match diff_pattern(m).0 {
            DiffKind::Delta | DiffKind::R => 1,
            DiffKind::K => self.algebra.top_degree(),
        }
    }

    /// Matrix of `d^{-m}` from block `(a, b, d)` of `P^{-m}` to block `(a, b, d + shift)`.
    pub fn block_matrix(&self, m: usize, a: Vertex, b: Vertex, d: usize) -> ExactMatrix {
        let t = &*self.algebra;
        let src = self.term(m).block(a, b, d);
        let tgt_layout = self.term(m - 1);
        let tgt = tgt_layout.block(a, b, d + self.shift(m));
        let mut mat = ExactMatrix::zeros(t.field, tgt.len(), src.len());
        let map = self.differential(m);
        let one = t.field.one();
        for (c, key) in src.iter().enumerate() {
            let mut img = PElem::new();
            map.apply_basis(t, *key, &mut img, &one);
            for (k, v) in img {
                let r = tgt_layout.index[&k];
                mat.set(r, c, v);
            }
        }
        mat
    }

    /// Matrix of the multiplication map `u` from block `(a, b, d)` of `P^0` to `e_a Λ_d e_b`.
    pub fn augmentation_block(&self, a: Vertex, b: Vertex, d: usize) -> ExactMatrix {
        let t = &*self.algebra;
        let src = self.layout_p.block(a, b, d);
        let target = t.slot(a, b, d);
        let mut mat = ExactMatrix::zeros(t.field, usize::from(target.is_some()), src.len());
        for (c, &(_, l, r)) in src.iter().enumerate() {
            if let Some((s, id)) = t.mul_basis(l, r) {
                debug_assert_eq!(Some(id), target);
                mat.set(0, c, t.field.from_i64(s as i64));
            }
        }
        mat
    }

    /// `u` applied to an element of `P^0`.
    pub fn augment(&self, e: &PElem) -> BTreeMap<usize, Scalar> {
        let t = &*self.algebra;
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (&(_, l, r), c) in e {
            if let Some((s, id)) = t.mul_basis(l, r) {
                let v = if s < 0 { -c } else { c.clone() };
                let entry = out.entry(id).or_insert_with(|| t.field.zero());
                *entry += &v;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Total rank of `d^{-m}` over all blocks.
    pub fn rank(&self, m: usize) -> usize {
        let keys: Vec<_> = self.term(m).blocks.keys().copied().collect();
        keys.par_iter()
            .map(|&(a, b, d)| self.block_matrix(m, a, b, d).rank())
            .sum()
    }

    pub fn augmentation_rank(&self) -> usize {
        let keys: Vec<_> = self.layout_p.blocks.keys().copied().collect();
        keys.par_iter()
            .map(|&(a, b, d)| self.augmentation_block(a, b, d).rank())
            .sum()
    }

    /// Exactness and minimality certificate for `P^0 .. P^{-depth}`.
    pub fn certify_exact(&self, depth: usize) -> ExactnessReport {
        assert!(depth >= 6);
        let t = &*self.algebra;
        let mut dd_zero = Vec::new();
        for m in 1..depth {
            let comp = self.differential(m).compose(t, self.differential(m + 1));
            dd_zero.push(IndexCheck {
                index: m,
                pass: comp.is_zero(),
            });
        }
        let mut u_delta = true;
        let delta = self.differential(1);
        for sigma in 0..delta.values.len() {
            if !self.augment(&delta.on_generator(sigma)).is_empty() {
                u_delta = false;
            }
        }

        let distinct: Vec<usize> = (1..=6).collect();
        let ranks: Vec<usize> = distinct.par_iter().map(|&m| self.rank(m)).collect();
        let rank_of = |m: usize| ranks[(m - 1) % 6];
        let u_rank = self.augmentation_rank();

        let mut rank_checks = vec![RankCheck {
            index: 0,
            rank_in: rank_of(1),
            rank_out: u_rank,
            dim: self.layout_p.dim,
            pass: u_rank == t.dim() && u_rank + rank_of(1) == self.layout_p.dim,
        }];
        for i in 1..depth {
            let dim = self.term(i).dim;
            let pass = rank_of(i) + rank_of(i + 1) == dim;
            rank_checks.push(RankCheck {
                index: i,
                rank_in: rank_of(i + 1),
                rank_out: rank_of(i),
                dim,
                pass,
            });
        }
        let syzygy_rank = rank_of(6);
        let third_syzygy_rank = rank_of(3);
        let periodic = (0..6).all(|r| {
            let twice = self.base[r].tau_twist(t).tau_twist(t);
            twice == self.base[r]
                && self.base[(r + 3) % 6] == self.base[r].tau_twist(t)
        });
        let minimal = self.base.iter().all(|m| m.is_radical(t));
        ExactnessReport {
            depth,
            dd_zero,
            augmentation_kills_delta: u_delta,
            rank_checks,
            sixth_syzygy_dim: syzygy_rank,
            third_syzygy_dim: third_syzygy_rank,
            algebra_dim: t.dim(),
            periodic,
            minimal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexCheck {
    pub index: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub index: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub dim: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub depth: usize,
    pub dd_zero: Vec<IndexCheck>,
    pub augmentation_kills_delta: bool,
    pub rank_checks: Vec<RankCheck>,
    /// Rank of `k_τ`, i.e. the dimension of the sixth syzygy.
    pub sixth_syzygy_dim: usize,
    pub third_syzygy_dim: usize,
    pub algebra_dim: usize,
    pub periodic: bool,
    pub minimal: bool,
}

impl ExactnessReport {
    pub fn pass(&self) -> bool {
        self.dd_zero.iter().all(|c| c.pass)
            && self.augmentation_kills_delta
            && self.rank_checks.iter().all(|c| c.pass)
            && self.sixth_syzygy_dim == self.algebra_dim
            && self.third_syzygy_dim == self.algebra_dim
            && self.periodic
            && self.minimal
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in self.dd_zero.iter().filter(|c| !c.pass) {
            out.push(format!("d o d != 0 at index {}", c.index));
        }
        for c in self.rank_checks.iter().filter(|c| !c.pass) {
            out.push(format!(
                "not exact at index {}: {} + {} != {}",
                c.index, c.rank_in, c.rank_out, c.dim
            ));
        }
        if !self.augmentation_kills_delta {
            out.push("u o d != 0".into());
        }
        if self.sixth_syzygy_dim != self.algebra_dim {
            out.push(format!("sixth syzygy has dimension {}", self.sixth_syzygy_dim));
        }
        if !self.periodic {
            out.push("twist pattern is not periodic".into());
        }
        if !self.minimal {
            out.push("a differential has a unit-degree value term".into());
        }
        out
    }
}

fn term(t: &AlgebraTable, c: i64, summand: usize, left: usize, right: usize) -> MapTerm {
    MapTerm {
        coeff: t.field.from_i64(c),
        summand,
        left,
        right,
    }
}

/// `δ(e_{i(a)} ⊗ e_{t(a)}) = a ⊗ e_{t(a)} - e_{i(a)} ⊗ a`.
pub fn delta_map(t: &AlgebraTable) -> BimoduleMap {
    let values = t
        .quiver
        .arrows
        .iter()
        .map(|a| {
            let aid = t.arrow_id(a.id);
            vec![
                term(t, 1, a.target - 1, aid, t.vertex_id(a.target)),
                term(t, -1, a.source - 1, t.vertex_id(a.source), aid),
            ]
        })
        .collect();
    BimoduleMap {
        source: TermKind::Q,
        target: TermKind::P,
        values,
    }
}

/// `R(e_i ⊗ e_i) = Σ_{i(a)=i} e_i ⊗ ā + a ⊗ e_i`, the first term in summand `a`,
/// the second in summand `ā`.
pub fn r_map(t: &AlgebraTable) -> BimoduleMap {
    let values = (1..=t.n())
        .map(|i| {
            let mut v = Vec::new();
            for a in t.quiver.arrows.iter().filter(|a| a.source == i) {
                v.push(term(t, 1, a.id, t.vertex_id(i), t.arrow_id(a.bar)));
                v.push(term(t, 1, a.bar, t.arrow_id(a.id), t.vertex_id(i)));
            }
            v
        })
        .collect();
    BimoduleMap {
        source: TermKind::P,
        target: TermKind::Q,
        values,
    }
}

/// `k(e_i ⊗ e_i) = Σ_{x ∈ e_iB} (-1)^{deg x} x ⊗ x*`.
pub fn k_map(t: &AlgebraTable, f: &NakayamaForm) -> BimoduleMap {
    let values = (1..=t.n())
        .map(|i| {
            t.ids_from(i)
                .into_iter()
                .map(|x| {
                    let (s, star) = f.dual_of(x);
                    let sign = if t.basis[x].degree % 2 == 0 { 1 } else { -1 };
                    term(t, sign * s as i64, t.basis[x].target - 1, x, star)
                })
                .collect()
        })
        .collect();
    BimoduleMap {
        source: TermKind::P,
        target: TermKind::P,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::exactla::FieldSpec;
    use crate::nakayama::associated_form;

    fn res(n: usize) -> Resolution {
        let t = Arc::new(build_algebra(n, FieldSpec::rationals()).unwrap());
        let f = associated_form(&t).unwrap();
        Resolution::new(t, &f)
    }

    #[test]
    fn term_pattern() {
        assert_eq!(term_kind(0), TermKind::P);
        assert_eq!(term_kind(1), TermKind::Q);
        assert_eq!(term_kind(4), TermKind::Q);
        assert_eq!(diff_pattern(4), (DiffKind::Delta, true));
        assert_eq!(diff_pattern(7), (DiffKind::Delta, false));
    }

    #[test]
    fn k_for_one_vertex() {
        let r = res(1);
        let t = r.algebra();
        let k = r.differential(3);
        let e = t.vertex_id(1);
        let eps = t.arrow_id(0);
        let img = k.on_generator(0);
        assert_eq!(img.get(&(0, e, eps)), Some(&t.field.one()));
        assert_eq!(img.get(&(0, eps, e)), Some(&t.field.from_i64(-1)));
    }

    #[test]
    fn r_at_last_vertex() {
        let r = res(3);
        let t = r.algebra();
        let img = r.differential(2).on_generator(2);
        let a2 = t.quiver.a(2);
        let ab2 = t.quiver.abar(2);
        assert_eq!(img.len(), 2);
        assert!(img.contains_key(&(ab2, t.vertex_id(3), t.arrow_id(a2))));
        assert!(img.contains_key(&(a2, t.arrow_id(ab2), t.vertex_id(3))));
    }

    #[test]
    fn twist_is_an_involution() {
        let r = res(3);
        let t = r.algebra();
        for m in 1..=6 {
            let d = r.differential(m);
            assert_eq!(&d.tau_twist(t).tau_twist(t), d);
        }
        let dt = r.differential(4).on_generator(0);
        assert!(dt.values().all(|c| c.is_one()));
    }

    #[test]
    fn small_windows_are_exact() {
        for n in 1..=3 {
            let rep = res(n).certify_exact(7);
            assert!(rep.pass(), "n = {n}: {:?}", rep.failures());
        }
    }
}
