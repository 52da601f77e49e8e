//! The preprojective algebra of type L_n.
//!
//! The quiver has vertices `1..=n`, a loop `ε` at vertex 1 and arrows
//! `a_i: i -> i+1`, `ā_i: i+1 -> i`. Paths are written left to right, so
//! `xy` means "first x, then y" and `e_i x e_j` runs from `i` to `j`.
//! There is one relation per vertex, `Σ_{i(a)=v} a ā = 0`.
//!
//! The algebra is built in two passes. First a working basis is found by
//! degreewise linear elimination: degree `d` is spanned by `arrow · w` for
//! working elements `w` of degree `d - 1`, modulo the products `r_v · b`
//! with `b` of degree `d - 2`. Then every monomial of the canonical basis
//! `B` is evaluated in that working basis and certified to be a nonzero
//! multiple of a distinct working element. Every product of two elements
//! of `B` turns out to be `±` an element of `B` or zero, so the product
//! table stores signs only.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::exactla::{ExactMatrix, FieldSpec, Scalar};

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("n must be at least 1")]
    EmptyQuiver,
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("center mismatch: solved dimension {found}, expected {expected}")]
    CenterMismatch { found: usize, expected: usize },
}

/// Sign convention for the top-degree diagonal elements of `B`.
///
/// `Signed` is the dualizable basis. `Unsigned` drops the sign on `ω_i`
/// and exists so tests can watch dualizability fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SocleSignConvention {
    #[default]
    Signed,
    Unsigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub id: usize,
    pub source: Vertex,
    pub target: Vertex,
    pub bar: usize,
    pub name: String,
}

/// The doubled quiver of L_n. Arrow ids: `0 = ε`, `i = a_i`, `n - 1 + i = ā_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quiver {
    pub n: usize,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut arrows = vec![Arrow {
            id: 0,
            source: 1,
            target: 1,
            bar: 0,
            name: "eps".into(),
        }];
        for i in 1..n {
            arrows.push(Arrow {
                id: i,
                source: i,
                target: i + 1,
                bar: n - 1 + i,
                name: format!("a{i}"),
            });
        }
        for i in 1..n {
            arrows.push(Arrow {
                id: n - 1 + i,
                source: i + 1,
                target: i,
                bar: i,
                name: format!("ab{i}"),
            });
        }
        Self { n, arrows }
    }

    pub fn eps(&self) -> usize {
        0
    }

    pub fn a(&self, i: usize) -> usize {
        assert!((1..self.n).contains(&i));
        i
    }

    pub fn abar(&self, i: usize) -> usize {
        assert!((1..self.n).contains(&i));
        self.n - 1 + i
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisMonomial {
    pub id: usize,
    pub source: Vertex,
    pub target: Vertex,
    pub degree: usize,
    /// Arrow ids, left to right. Empty for the vertex idempotents.
    pub path: Vec<usize>,
    pub sign: i8,
}

/// A signed basis monomial or zero.
pub type SignedId = Option<(i8, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub coeffs: BTreeMap<usize, Scalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn monomial(field: FieldSpec, id: usize, coeff: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(id, &field.from_i64(coeff));
        e
    }

    pub fn add_term(&mut self, id: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(id).or_insert_with(|| c.field().zero());
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, id: usize) -> Option<&Scalar> {
        self.coeffs.get(&id)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for (id, c) in &self.coeffs {
            out.add_term(*id, &(c * s));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (id, c) in &other.coeffs {
            out.add_term(*id, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (id, c) in &other.coeffs {
            out.add_term(*id, &(-c));
        }
        out
    }
}

/// The finite-dimensional algebra together with its canonical basis and sign table.
#[derive(Debug, Clone)]
pub struct AlgebraTable {
    pub field: FieldSpec,
    pub quiver: Quiver,
    pub convention: SocleSignConvention,
    pub basis: Vec<BasisMonomial>,
    product: Vec<SignedId>,
    arrow_left: Vec<Vec<SignedId>>,
    by_endpoints: Vec<Vec<Vec<usize>>>,
    by_slot: HashMap<(Vertex, Vertex, usize), usize>,
    vertex_ids: Vec<usize>,
    arrow_ids: Vec<usize>,
    socle_ids: Vec<usize>,
}

impl AlgebraTable {
    pub fn n(&self) -> usize {
        self.quiver.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Top degree `2n - 1`, the degree of the socle.
    pub fn top_degree(&self) -> usize {
        2 * self.n() - 1
    }

    pub fn mul_basis(&self, b: usize, c: usize) -> SignedId {
        self.product[b * self.basis.len() + c]
    }

    /// `arrow · b` in the basis `B`.
    pub fn arrow_times(&self, arrow: usize, b: usize) -> SignedId {
        self.arrow_left[arrow][b]
    }

    /// Basis ids of `e_s B e_t`, in increasing degree.
    pub fn ids_between(&self, s: Vertex, t: Vertex) -> &[usize] {
        &self.by_endpoints[s - 1][t - 1]
    }

    pub fn dim_between(&self, s: Vertex, t: Vertex) -> usize {
        self.ids_between(s, t).len()
    }

    /// Basis ids of `e_s B`.
    pub fn ids_from(&self, s: Vertex) -> Vec<usize> {
        (1..=self.n())
            .flat_map(|t| self.ids_between(s, t).iter().copied())
            .collect()
    }

    /// Basis ids of `B e_t`.
    pub fn ids_into(&self, t: Vertex) -> Vec<usize> {
        (1..=self.n())
            .flat_map(|s| self.ids_between(s, t).iter().copied())
            .collect()
    }

    pub fn slot(&self, s: Vertex, t: Vertex, degree: usize) -> Option<usize> {
        self.by_slot.get(&(s, t, degree)).copied()
    }

    pub fn vertex_id(&self, v: Vertex) -> usize {
        self.vertex_ids[v - 1]
    }

    pub fn arrow_id(&self, arrow: usize) -> usize {
        self.arrow_ids[arrow]
    }

    /// Basis id of `ω_v`.
    pub fn socle_id(&self, v: Vertex) -> usize {
        self.socle_ids[v - 1]
    }

    pub fn socle_ids(&self) -> &[usize] {
        &self.socle_ids
    }

    /// Evaluates a path (arrow ids, left to right) as `±` a basis element or zero.
    pub fn path_value(&self, path: &[usize], start: Vertex) -> SignedId {
        let end = match path.last() {
            Some(&a) => self.quiver.arrows[a].target,
            None => start,
        };
        let mut cur: SignedId = Some((1, self.vertex_id(end)));
        for &a in path.iter().rev() {
            let (s, b) = cur?;
            cur = self.arrow_times(a, b).map(|(s2, c)| (s * s2, c));
        }
        if let Some((_, id)) = cur {
            if self.basis[id].source != start {
                return None;
            }
        }
        cur
    }

    pub fn element(&self, id: usize, coeff: i64) -> AlgebraElement {
        AlgebraElement::monomial(self.field, id, coeff)
    }

    pub fn one(&self) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        for v in 1..=self.n() {
            e.add_term(self.vertex_id(v), &self.field.one());
        }
        e
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (b, cb) in &x.coeffs {
            for (c, cc) in &y.coeffs {
                if let Some((s, d)) = self.mul_basis(*b, *c) {
                    let mut v = cb * cc;
                    if s < 0 {
                        v = -v;
                    }
                    out.add_term(d, &v);
                }
            }
        }
        out
    }

    pub fn commutator(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.multiply(x, y).sub(&self.multiply(y, x))
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        (1..=n)
            .map(|i| (1..=n).map(|j| self.dim_between(i, j) as i64).collect())
            .collect()
    }

    pub fn cartan_determinant(&self) -> Scalar {
        ExactMatrix::from_i64_rows(FieldSpec::rationals(), &self.cartan_matrix()).determinant()
    }

    /// `x_0 = Σ_{i=1}^{n-1} (-1)^i a_i ā_i`.
    pub fn x0(&self) -> AlgebraElement {
        let mut x = AlgebraElement::zero();
        for i in 1..self.n() {
            let path = [self.quiver.a(i), self.quiver.abar(i)];
            if let Some((s, id)) = self.path_value(&path, i) {
                let sign = if i % 2 == 0 { 1 } else { -1 } * s as i64;
                x.add_term(id, &self.field.from_i64(sign));
            }
        }
        x
    }

    pub fn power(&self, x: &AlgebraElement, k: usize) -> AlgebraElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.multiply(&acc, x);
        }
        acc
    }

    pub fn socle_basis(&self) -> Vec<AlgebraElement> {
        self.socle_ids.iter().map(|&id| self.element(id, 1)).collect()
    }

    /// Ids of all diagonal monomials, `⊕ e_i B e_i`, vertex by vertex.
    pub fn diagonal_ids(&self) -> Vec<usize> {
        (1..=self.n())
            .flat_map(|v| self.ids_between(v, v).iter().copied())
            .collect()
    }

    /// Dimension of the commutant of the arrows inside `⊕ e_i Λ e_i`.
    pub fn center_dimension(&self) -> usize {
        self.center_kernel().len()
    }

    fn center_kernel(&self) -> Vec<Vec<Scalar>> {
        let diag = self.diagonal_ids();
        let nb = self.dim();
        let arrows = self.quiver.arrow_count();
        let mut m = ExactMatrix::zeros(self.field, arrows * nb, diag.len());
        for (col, &z) in diag.iter().enumerate() {
            for a in 0..arrows {
                let aid = self.arrow_id(a);
                if let Some((s, id)) = self.mul_basis(aid, z) {
                    m.add_at(a * nb + id, col, &self.field.from_i64(s as i64));
                }
                if let Some((s, id)) = self.mul_basis(z, aid) {
                    m.add_at(a * nb + id, col, &self.field.from_i64(-(s as i64)));
                }
            }
        }
        m.kernel_basis()
    }

    /// The basis `{1, x_0, ..., x_0^{n-1}, ω_1, ..., ω_n}` of the center,
    /// certified against the commutant computed by linear algebra.
    pub fn center_basis(&self) -> Result<Vec<AlgebraElement>, AlgebraError> {
        let n = self.n();
        let kernel_dim = self.center_dimension();
        if kernel_dim != 2 * n {
            return Err(AlgebraError::CenterMismatch {
                found: kernel_dim,
                expected: 2 * n,
            });
        }
        let x0 = self.x0();
        let mut basis: Vec<AlgebraElement> = (0..n).map(|k| self.power(&x0, k)).collect();
        basis.extend(self.socle_basis());
        let diag = self.diagonal_ids();
        let columns: Vec<Vec<Scalar>> = basis
            .iter()
            .map(|e| {
                diag.iter()
                    .map(|id| e.coeff(*id).cloned().unwrap_or_else(|| self.field.zero()))
                    .collect()
            })
            .collect();
        let rank = ExactMatrix::from_columns(self.field, diag.len(), &columns).rank();
        let central = basis.iter().all(|z| {
            (0..self.quiver.arrow_count())
                .all(|a| self.commutator(z, &self.element(self.arrow_id(a), 1)).is_zero())
        });
        if rank != 2 * n || !central {
            return Err(AlgebraError::CenterMismatch {
                found: if central { rank } else { 0 },
                expected: 2 * n,
            });
        }
        Ok(basis)
    }

    pub fn basis_name(&self, id: usize) -> String {
        let b = &self.basis[id];
        if b.path.is_empty() {
            return format!("e{}", b.source);
        }
        let body: Vec<&str> = b
            .path
            .iter()
            .map(|a| self.quiver.arrows[*a].name.as_str())
            .collect();
        let body = body.join("*");
        if b.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn repeat(arrow: usize, k: usize) -> Vec<usize> {
    vec![arrow; k]
}

/// The monomials of `B`, as (source, target, path, sign).
fn canonical_monomials(q: &Quiver, convention: SocleSignConvention) -> Vec<(Vertex, Vertex, Vec<usize>, i8)> {
    let n = q.n;
    let eps = q.eps();
    let a_run = |from: usize, to: usize| -> Vec<usize> { (from..=to).map(|k| q.a(k)).collect() };
    let abar_run_down = |from: usize, to: usize| -> Vec<usize> {
        // ā_from ā_{from-1} ... ā_to
        (to..=from).rev().map(|k| q.abar(k)).collect()
    };
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i > j {
                continue;
            }
            let mut family: Vec<(Vec<usize>, i8)> = Vec::new();
            if i == 1 {
                let top = if j == 1 { 2 * n - 1 } else { 2 * (n - j) + 1 };
                for k in 0..=top {
                    let mut p = repeat(eps, k);
                    if j > 1 {
                        p.extend(a_run(1, j - 1));
                    }
                    family.push((p, 1));
                }
            } else {
                for m in (j - 1)..n {
                    let mut p = if i <= m { a_run(i, m) } else { Vec::new() };
                    if m >= j {
                        p.extend(abar_run_down(m, j));
                    }
                    family.push((p, 1));
                }
                for t in 0..=(n - j) {
                    let mut p = abar_run_down(i - 1, 1);
                    p.extend(repeat(eps, 2 * t + 1));
                    p.extend(a_run(1, j - 1));
                    let top_diag = i == j && t == n - j;
                    let sign = if top_diag && convention == SocleSignConvention::Signed {
                        if (i * (i - 1) / 2) % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    } else {
                        1
                    };
                    family.push((p, sign));
                }
            }
            for (p, s) in family {
                out.push((i, j, p.clone(), s));
                if i < j {
                    let barred: Vec<usize> = p.iter().rev().map(|a| q.arrows[*a].bar).collect();
                    out.push((j, i, barred, s));
                }
            }
        }
    }
    out
}

struct Working {
    source: Vec<Vertex>,
    target: Vec<Vertex>,
    by_degree: Vec<Vec<usize>>,
    action: HashMap<(usize, usize), Vec<(usize, Scalar)>>,
}

impl Working {
    fn push(&mut self, s: Vertex, t: Vertex, d: usize) -> usize {
        let id = self.source.len();
        self.source.push(s);
        self.target.push(t);
        if self.by_degree.len() <= d {
            self.by_degree.resize(d + 1, Vec::new());
        }
        self.by_degree[d].push(id);
        id
    }

    fn act(&self, arrow: usize, v: &BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (w, c) in v {
            if let Some(img) = self.action.get(&(arrow, *w)) {
                for (w2, k) in img {
                    let e = out.entry(*w2).or_insert_with(|| c.field().zero());
                    *e += &(c * k);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

fn eliminate(q: &Quiver, field: FieldSpec) -> Working {
    let n = q.n;
    let mut w = Working {
        source: Vec::new(),
        target: Vec::new(),
        by_degree: Vec::new(),
        action: HashMap::new(),
    };
    for v in 1..=n {
        w.push(v, v, 0);
    }
    for a in &q.arrows {
        let id = w.push(a.source, a.target, 1);
        let ev = w.by_degree[0][a.target - 1];
        w.action.insert((a.id, ev), vec![(id, field.one())]);
    }
    let mut d = 2;
    loop {
        let prev = w.by_degree[d - 1].clone();
        let mut blocks: BTreeMap<(Vertex, Vertex), Vec<(usize, usize)>> = BTreeMap::new();
        for &p in &prev {
            for a in q.arrows.iter().filter(|a| a.target == w.source[p]) {
                blocks.entry((a.source, w.target[p])).or_default().push((a.id, p));
            }
        }
        if blocks.is_empty() {
            break;
        }
        let before = w.by_degree.get(d - 2).cloned().unwrap_or_default();
        let mut created_any = false;
        if w.by_degree.len() <= d {
            w.by_degree.resize(d + 1, Vec::new());
        }
        for ((s, t), span) in blocks {
            let index: HashMap<(usize, usize), usize> =
                span.iter().enumerate().map(|(k, x)| (*x, k)).collect();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for &b in before.iter().filter(|&&b| w.source[b] == s && w.target[b] == t) {
                let mut row = vec![field.zero(); span.len()];
                for a in q.arrows.iter().filter(|a| a.source == s) {
                    let single: BTreeMap<usize, Scalar> = [(b, field.one())].into_iter().collect();
                    let abar_b = w.act(a.bar, &single);
                    for (w1, c) in abar_b {
                        let k = index[&(a.id, w1)];
                        row[k] += &c;
                    }
                }
                rows.push(row);
            }
            let ncols = span.len();
            let mut m = ExactMatrix::zeros(field, rows.len(), ncols);
            for (r, row) in rows.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        m.set(r, c, v.clone());
                    }
                }
            }
            let ech = m.echelonize();
            let mut is_pivot = vec![None; ncols];
            for (r, &p) in ech.pivots.iter().enumerate() {
                is_pivot[p] = Some(r);
            }
            let mut new_id = vec![usize::MAX; ncols];
            for c in 0..ncols {
                if is_pivot[c].is_none() {
                    new_id[c] = w.push(s, t, d);
                    created_any = true;
                }
            }
            for (c, &(arrow, p)) in span.iter().enumerate() {
                let img = match is_pivot[c] {
                    None => vec![(new_id[c], field.one())],
                    Some(r) => (0..ncols)
                        .filter(|&f| is_pivot[f].is_none())
                        .filter_map(|f| {
                            let e = ech.reduced.get(r, f);
                            (!e.is_zero()).then(|| (new_id[f], -e))
                        })
                        .collect(),
                };
                w.action.insert((arrow, p), img);
            }
        }
        if !created_any {
            break;
        }
        d += 1;
    }
    w
}

/// Builds `P(L_n)` over `field` with the dualizable basis `B`.
pub fn build_algebra(n: usize, field: FieldSpec) -> Result<AlgebraTable, AlgebraError> {
    build_algebra_with(n, field, SocleSignConvention::Signed)
}

pub fn build_algebra_with(
    n: usize,
    field: FieldSpec,
    convention: SocleSignConvention,
) -> Result<AlgebraTable, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::EmptyQuiver);
    }
    let q = Quiver::new(n);
    let work = eliminate(&q, field);
    let mut mons = canonical_monomials(&q, convention);
    mons.sort_by(|x, y| (x.0, x.1, x.2.len()).cmp(&(y.0, y.1, y.2.len())));

    let working_dim = work.source.len();
    if working_dim != mons.len() {
        return Err(AlgebraError::BasisMismatch(format!(
            "working basis has {working_dim} elements, B lists {}",
            mons.len()
        )));
    }

    // b = mu[b] * w_of[b]; b_of_w inverts w_of.
    let mut mu = Vec::with_capacity(mons.len());
    let mut w_of = Vec::with_capacity(mons.len());
    let mut b_of_w = vec![usize::MAX; working_dim];
    let mut basis = Vec::with_capacity(mons.len());
    for (id, (s, t, path, sign)) in mons.iter().enumerate() {
        let mut v: BTreeMap<usize, Scalar> = [(work.by_degree[0][t - 1], field.one())]
            .into_iter()
            .collect();
        for &a in path.iter().rev() {
            v = work.act(a, &v);
        }
        if v.len() != 1 {
            return Err(AlgebraError::BasisMismatch(format!(
                "monomial {path:?} from {s} to {t} evaluates to {} working terms",
                v.len()
            )));
        }
        let (wid, lambda) = v.into_iter().next().unwrap();
        if work.source[wid] != *s || work.target[wid] != *t || b_of_w[wid] != usize::MAX {
            return Err(AlgebraError::BasisMismatch(format!(
                "monomial {path:?} lands on an occupied or wrong slot"
            )));
        }
        b_of_w[wid] = id;
        w_of.push(wid);
        let m = if *sign < 0 { -lambda } else { lambda };
        mu.push(m);
        basis.push(BasisMonomial {
            id,
            source: *s,
            target: *t,
            degree: path.len(),
            path: path.clone(),
            sign: *sign,
        });
    }

    let nb = basis.len();
    let arrows = q.arrow_count();
    let mut arrow_left = vec![vec![None; nb]; arrows];
    for a in 0..arrows {
        for b in 0..nb {
            if q.arrows[a].target != basis[b].source {
                continue;
            }
            let single: BTreeMap<usize, Scalar> = [(w_of[b], field.one())].into_iter().collect();
            let img = work.act(a, &single);
            if img.is_empty() {
                continue;
            }
            if img.len() != 1 {
                return Err(AlgebraError::BasisMismatch(
                    "arrow action is not monomial".into(),
                ));
            }
            let (w2, k) = img.into_iter().next().unwrap();
            let c = b_of_w[w2];
            let coeff = &(&mu[b] * &k) / &mu[c];
            let sign = if coeff.is_one() {
                1
            } else if (-&coeff).is_one() {
                -1
            } else {
                return Err(AlgebraError::BasisMismatch(format!(
                    "structure constant {coeff} is not a sign"
                )));
            };
            arrow_left[a][b] = Some((sign, c));
        }
    }

    let mut by_endpoints = vec![vec![Vec::new(); n]; n];
    let mut by_slot = HashMap::new();
    for b in &basis {
        by_endpoints[b.source - 1][b.target - 1].push(b.id);
        if by_slot.insert((b.source, b.target, b.degree), b.id).is_some() {
            return Err(AlgebraError::BasisMismatch(format!(
                "two basis elements share degree {} from {} to {}",
                b.degree, b.source, b.target
            )));
        }
    }
    let vertex_ids: Vec<usize> = (1..=n).map(|v| by_slot[&(v, v, 0)]).collect();
    let arrow_ids: Vec<usize> = q
        .arrows
        .iter()
        .map(|a| by_slot[&(a.source, a.target, 1)])
        .collect();
    let socle_ids: Vec<usize> = (1..=n)
        .map(|v| {
            by_slot
                .get(&(v, v, 2 * n - 1))
                .copied()
                .ok_or_else(|| AlgebraError::BasisMismatch(format!("no socle at vertex {v}")))
        })
        .collect::<Result<_, _>>()?;

    let mut table = AlgebraTable {
        field,
        quiver: q,
        convention,
        basis,
        product: Vec::new(),
        arrow_left,
        by_endpoints,
        by_slot,
        vertex_ids,
        arrow_ids,
        socle_ids,
    };
    let mut product = vec![None; nb * nb];
    for b in 0..nb {
        let bm = &table.basis[b];
        for c in 0..nb {
            if bm.target != table.basis[c].source {
                continue;
            }
            let mut cur: SignedId = Some((bm.sign, c));
            for &a in bm.path.iter().rev() {
                let Some((s, id)) = cur else { break };
                cur = table.arrow_times(a, id).map(|(s2, d)| (s * s2, d));
            }
            product[b * nb + c] = cur;
        }
    }
    table.product = product;
    Ok(table)
}

/// Structural checks on a built table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SanityReport {
    pub dimension: usize,
    pub expected_dimension: usize,
    pub associative: bool,
    pub triples_checked: u64,
    pub graded_pieces_at_most_one: bool,
    pub degree_sets: bool,
    /// Identities about long paths through vertex 1, numbered as in the standard list.
    pub path_bound: bool,
    pub loop_through_one: bool,
    pub back_and_forth: bool,
    pub commutation: bool,
    pub failures: Vec<String>,
}

impl SanityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl AlgebraTable {
    fn eps_path(&self, k: usize) -> Vec<usize> {
        vec![self.quiver.eps(); k]
    }

    /// `a_from ... a_to` (empty when `from > to`).
    fn a_path(&self, from: usize, to: usize) -> Vec<usize> {
        (from..=to).map(|i| self.quiver.a(i)).collect()
    }

    fn abar_desc(&self, from: usize, to: usize) -> Vec<usize> {
        (to..=from).rev().map(|i| self.quiver.abar(i)).collect()
    }

    fn same(&self, lhs: SignedId, sign: i8, rhs: SignedId) -> bool {
        match (lhs, rhs) {
            (None, None) => true,
            (Some((s1, a)), Some((s2, b))) => a == b && s1 == sign * s2,
            _ => false,
        }
    }

    /// Full associativity scan, degree sets and the path identities.
    pub fn sanity_report(&self) -> SanityReport {
        let n = self.n();
        let nb = self.dim();
        let mut failures = Vec::new();

        let mut associative = true;
        for b in 0..nb {
            for c in 0..nb {
                let bc = self.mul_basis(b, c);
                for d in 0..nb {
                    let left = bc.and_then(|(s, x)| self.mul_basis(x, d).map(|(s2, y)| (s * s2, y)));
                    let right = self.mul_basis(c, d).and_then(|(s, x)| self.mul_basis(b, x).map(|(s2, y)| (s * s2, y)));
                    if left != right {
                        if associative {
                            failures.push(format!(
                                "({}*{})*{} != {}*({}*{})",
                                self.basis_name(b),
                                self.basis_name(c),
                                self.basis_name(d),
                                self.basis_name(b),
                                self.basis_name(c),
                                self.basis_name(d)
                            ));
                        }
                        associative = false;
                    }
                }
            }
        }

        let mut graded = true;
        let mut degree_sets = true;
        for i in 1..=n {
            for j in 1..=n {
                let mut degs: Vec<usize> = self.ids_between(i, j).iter().map(|&b| self.basis[b].degree).collect();
                degs.sort_unstable();
                if degs.windows(2).any(|w| w[0] == w[1]) {
                    graded = false;
                    failures.push(format!("e{i} L e{j} has a repeated degree"));
                }
                let lo = i.abs_diff(j);
                let m = i.max(j);
                let mut expected: Vec<usize> = (0..=(n - m)).map(|k| lo + 2 * k).collect();
                expected.extend((0..=(n - m)).map(|k| i + j - 1 + 2 * k));
                expected.sort_unstable();
                if degs != expected {
                    degree_sets = false;
                    failures.push(format!("degrees of e{i} B e{j}: {degs:?}, expected {expected:?}"));
                }
            }
        }

        let mut path_bound = true;
        for i in 1..=n {
            for j in 1..=n {
                for k in 0..=n {
                    let mut p = self.abar_desc(i - 1, 1);
                    p.extend(self.eps_path(2 * k));
                    p.extend(self.a_path(1, j - 1));
                    if self.path_value(&p, i).is_some() && k as i64 > n as i64 - i as i64 - j as i64 + 1 {
                        path_bound = false;
                        failures.push(format!("nonzero path through eps^{} from {i} to {j}", 2 * k));
                    }
                }
            }
        }

        let mut loop_through_one = true;
        let mut back_and_forth = true;
        for j in 2..=n {
            let mut p = self.a_path(1, j - 1);
            p.extend(self.abar_desc(j - 1, 1));
            let sign = if (j * (j - 1) / 2) % 2 == 0 { 1 } else { -1 };
            if !self.same(self.path_value(&p, 1), sign, self.path_value(&self.eps_path(2 * (j - 1)), 1)) {
                loop_through_one = false;
                failures.push(format!("a_1..a_{} abar_{}..abar_1", j - 1, j - 1));
            }
            let mut p = self.a_path(1, j - 1);
            p.push(self.quiver.abar(j - 1));
            let mut q = self.eps_path(2);
            q.extend(self.a_path(1, j - 2));
            let sign = if (j - 1) % 2 == 0 { 1 } else { -1 };
            if !self.same(self.path_value(&p, 1), sign, self.path_value(&q, 1)) {
                back_and_forth = false;
                failures.push(format!("a_1..a_{} abar_{}", j - 1, j - 1));
            }
        }

        let mut commutation = true;
        for i in 1..n {
            for j in i..n {
                let mut p = vec![self.quiver.abar(i)];
                p.extend(self.a_path(i, j));
                let rhs = if j + 1 < n {
                    let mut q = self.a_path(i + 1, j + 1);
                    q.push(self.quiver.abar(j + 1));
                    self.path_value(&q, i + 1)
                } else {
                    None
                };
                let sign = if (j - i + 1) % 2 == 0 { 1 } else { -1 };
                if !self.same(self.path_value(&p, i + 1), sign, rhs) {
                    commutation = false;
                    failures.push(format!("abar_{i} a_{i}..a_{j}"));
                }
            }
        }

        let expected_dimension = n * (n + 1) * (2 * n + 1) / 3;
        if nb != expected_dimension {
            failures.push(format!("dimension {nb}, expected {expected_dimension}"));
        }
        SanityReport {
            dimension: nb,
            expected_dimension,
            associative,
            triples_checked: (nb as u64).pow(3),
            graded_pieces_at_most_one: graded,
            degree_sets,
            path_bound,
            loop_through_one,
            back_and_forth,
            commutation,
            failures,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn sanity_small() {
        for n in 1..=4 {
            let r = build_algebra(n, q()).unwrap().sanity_report();
            assert!(r.pass(), "n = {n}: {:?}", r.failures);
        }
    }

    #[test]
    fn small_dimensions() {
        let t1 = build_algebra(1, q()).unwrap();
        assert_eq!(t1.dim(), 2);
        assert_eq!(t1.basis_name(1), "eps");
        assert_eq!(build_algebra(2, q()).unwrap().dim(), 10);
        assert_eq!(build_algebra(3, q()).unwrap().dim(), 28);
    }

    #[test]
    fn cartan_for_two_vertices() {
        let t = build_algebra(2, q()).unwrap();
        assert_eq!(t.cartan_matrix(), vec![vec![4, 2], vec![2, 2]]);
        assert_eq!(build_algebra(1, q()).unwrap().cartan_matrix(), vec![vec![2]]);
    }

    #[test]
    fn defining_relations() {
        for n in 2..=4 {
            let t = build_algebra(n, q()).unwrap();
            let e = t.quiver.eps();
            let lhs = t.path_value(&[e, e], 1).unwrap();
            let rhs = t.path_value(&[t.quiver.a(1), t.quiver.abar(1)], 1).unwrap();
            assert_eq!(lhs.1, rhs.1);
            assert_eq!(lhs.0, -rhs.0);
            let last = [t.quiver.abar(n - 1), t.quiver.a(n - 1)];
            assert_eq!(t.path_value(&last, n), None);
        }
    }

    #[test]
    fn unit_acts_trivially() {
        let t = build_algebra(3, q()).unwrap();
        for b in 0..t.dim() {
            let s = t.basis[b].source;
            assert_eq!(t.mul_basis(t.vertex_id(s), b), Some((1, b)));
            assert_eq!(t.mul_basis(b, t.vertex_id(t.basis[b].target)), Some((1, b)));
        }
    }

    #[test]
    fn socle_is_annihilated_by_arrows() {
        let t = build_algebra(3, q()).unwrap();
        assert_eq!(t.socle_id(1), t.slot(1, 1, 5).unwrap());
        for a in 0..t.quiver.arrow_count() {
            let aid = t.arrow_id(a);
            let arrow = &t.quiver.arrows[a];
            assert_eq!(t.mul_basis(aid, t.socle_id(arrow.target)), None);
            assert_eq!(t.mul_basis(t.socle_id(arrow.source), aid), None);
        }
    }

    #[test]
    fn center_has_dimension_2n() {
        for n in 1..=4 {
            let t = build_algebra(n, q()).unwrap();
            assert_eq!(t.center_basis().unwrap().len(), 2 * n);
            let x0 = t.x0();
            assert!(t.power(&x0, n).is_zero());
            for w in t.socle_basis() {
                assert!(t.multiply(&x0, &w).is_zero());
            }
        }
    }
}
