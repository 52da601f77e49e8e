//! The Nakayama form attached to the basis `B` and its dual basis.
//!
//! `(x, y)` is the sum over vertices of the `ω_i`-coefficient of `xy`.
//! Because every graded piece `e_i Λ_d e_j` is at most one-dimensional,
//! the dual of a monomial `b` is a signed multiple of its unique partner
//! of complementary degree with swapped endpoints.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraTable;
use crate::exactla::{ExactMatrix, LinearSolver, PivotOrder, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NakayamaError {
    #[error("degenerate form: gram rank {rank} < {dim}")]
    Degenerate { rank: usize, dim: usize },
    #[error("basis element {0} has no partner of complementary degree")]
    MissingPartner(usize),
}

#[derive(Debug, Clone)]
pub struct NakayamaForm {
    pub gram: ExactMatrix,
    /// `dual[b] = (s, c)` means `b* = s · c`.
    pub dual: Vec<(i8, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub pass: bool,
    pub witnesses: Vec<String>,
}

/// A failure of `a* a = ω_{t(a)}`: the product equals `sign · ω_vertex`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrowWitness {
    pub arrow: usize,
    pub sign: i8,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualizabilityReport {
    pub arrow_condition: ConditionResult,
    pub arrow_witnesses: Vec<ArrowWitness>,
    pub double_dual: ConditionResult,
    pub symmetry: ConditionResult,
}

impl DualizabilityReport {
    pub fn pass(&self) -> bool {
        self.arrow_condition.pass && self.double_dual.pass && self.symmetry.pass
    }
}

/// `(b, c)` for basis monomials, as an integer.
pub fn pair(t: &AlgebraTable, b: usize, c: usize) -> i64 {
    match t.mul_basis(b, c) {
        Some((s, d)) if t.socle_ids().contains(&d) => s as i64,
        _ => 0,
    }
}

/// The partner of `b`: the monomial of degree `2n - 1 - deg b` from `t(b)` to `s(b)`.
pub fn partner(t: &AlgebraTable, b: usize) -> Option<usize> {
    let m = &t.basis[b];
    let d = t.top_degree().checked_sub(m.degree)?;
    t.slot(m.target, m.source, d)
}

pub fn associated_form(t: &AlgebraTable) -> Result<NakayamaForm, NakayamaError> {
    let nb = t.dim();
    let mut gram = ExactMatrix::zeros(t.field, nb, nb);
    for b in 0..nb {
        for c in 0..nb {
            let v = pair(t, b, c);
            if v != 0 {
                gram.set(b, c, t.field.from_i64(v));
            }
        }
    }
    let rank = gram.rank();
    if rank < nb {
        return Err(NakayamaError::Degenerate { rank, dim: nb });
    }
    let mut dual = Vec::with_capacity(nb);
    for b in 0..nb {
        let c = partner(t, b).ok_or(NakayamaError::MissingPartner(b))?;
        let v = pair(t, b, c);
        if v == 0 {
            return Err(NakayamaError::Degenerate { rank, dim: nb });
        }
        dual.push((v as i8, c));
    }
    Ok(NakayamaForm { gram, dual })
}

impl NakayamaForm {
    pub fn dual_of(&self, b: usize) -> (i8, usize) {
        self.dual[b]
    }
}

/// Checks the three equivalent dualizability conditions independently.
pub fn certify_dualizable(t: &AlgebraTable, f: &NakayamaForm) -> DualizabilityReport {
    let nb = t.dim();

    let mut arrow_w = Vec::new();
    let mut arrow_text = Vec::new();
    for a in 0..t.quiver.arrow_count() {
        let aid = t.arrow_id(a);
        let (s, star) = f.dual_of(aid);
        let target = t.quiver.arrows[a].target;
        let prod = t.mul_basis(star, aid).map(|(s2, d)| (s * s2, d));
        let ok = prod == Some((1, t.socle_id(target)));
        if !ok {
            if let Some((sign, d)) = prod {
                let vertex = t.basis[d].source;
                arrow_w.push(ArrowWitness {
                    arrow: a,
                    sign,
                    vertex,
                });
                arrow_text.push(format!(
                    "{}* {} = {}w{}",
                    t.quiver.arrows[a].name,
                    t.quiver.arrows[a].name,
                    if sign < 0 { "-" } else { "" },
                    vertex
                ));
            } else {
                arrow_text.push(format!("{}* {} = 0", t.quiver.arrows[a].name, t.quiver.arrows[a].name));
            }
        }
    }

    // Double dual through partners: b** = λ b with λ = (b, b~) / (b~, b).
    let mut dd_text = Vec::new();
    for b in 0..nb {
        let (_, c) = f.dual_of(b);
        let lambda = pair(t, b, c) * pair(t, c, b);
        if lambda != 1 {
            dd_text.push(format!("{}** = -{}", t.basis_name(b), t.basis_name(b)));
        }
    }
    // Double dual through the gram matrix: the double dual basis is G^{-1} G^T.
    let solver = LinearSolver::new(&f.gram, PivotOrder::Natural);
    let gt = f.gram.transpose();
    let mut matrix_route_identity = true;
    for c in 0..nb {
        let col = solver.solve(&gt.column(c)).expect("gram is invertible");
        for (r, v) in col.iter().enumerate() {
            let expected = if r == c { t.field.one() } else { t.field.zero() };
            if *v != expected {
                matrix_route_identity = false;
            }
        }
    }
    if matrix_route_identity != dd_text.is_empty() {
        dd_text.push("partner and matrix routes disagree".into());
    }

    let mut sym_text = Vec::new();
    for b in 0..nb {
        for c in (b + 1)..nb {
            if f.gram.get(b, c) != f.gram.get(c, b) {
                sym_text.push(format!("({}, {}) != ({}, {})", t.basis_name(b), t.basis_name(c), t.basis_name(c), t.basis_name(b)));
            }
        }
    }

    DualizabilityReport {
        arrow_condition: ConditionResult {
            pass: arrow_text.is_empty(),
            witnesses: arrow_text,
        },
        arrow_witnesses: arrow_w,
        double_dual: ConditionResult {
            pass: dd_text.is_empty(),
            witnesses: dd_text,
        },
        symmetry: ConditionResult {
            pass: sym_text.is_empty(),
            witnesses: sym_text,
        },
    }
}

/// `(x a, y) = (x, a y)` for all basis triples.
pub fn form_is_associative(t: &AlgebraTable) -> bool {
    let nb = t.dim();
    let apply = |u: Option<(i8, usize)>, z: usize, left: bool| -> i64 {
        match u {
            None => 0,
            Some((s, w)) => s as i64 * if left { pair(t, w, z) } else { pair(t, z, w) },
        }
    };
    for x in 0..nb {
        for a in 0..nb {
            let xa = t.mul_basis(x, a);
            for y in 0..nb {
                if apply(xa, y, true) != apply(t.mul_basis(a, y), x, false) {
                    return false;
                }
            }
        }
    }
    true
}

/// The coefficient `(b, c)` as a field element.
pub fn pair_scalar(t: &AlgebraTable, b: usize, c: usize) -> Scalar {
    t.field.from_i64(pair(t, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, build_algebra_with, SocleSignConvention};
    use crate::exactla::FieldSpec;

    #[test]
    fn idempotents_pair_to_zero_and_dualize_to_socle() {
        let t = build_algebra(3, FieldSpec::rationals()).unwrap();
        let f = associated_form(&t).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                assert_eq!(pair(&t, t.vertex_id(i), t.vertex_id(j)), 0);
            }
            assert_eq!(f.dual_of(t.vertex_id(i)), (1, t.socle_id(i)));
            assert_eq!(f.dual_of(t.socle_id(i)), (1, t.vertex_id(i)));
        }
    }

    #[test]
    fn eps_dual_is_eps_power() {
        let t = build_algebra(3, FieldSpec::rationals()).unwrap();
        let f = associated_form(&t).unwrap();
        let eps = t.arrow_id(0);
        let e4 = t.slot(1, 1, 4).unwrap();
        assert_eq!(pair(&t, eps, e4), 1);
        assert_eq!(f.dual_of(eps), (1, e4));
    }

    #[test]
    fn canonical_basis_is_dualizable() {
        for n in 1..=4 {
            let t = build_algebra(n, FieldSpec::rationals()).unwrap();
            let f = associated_form(&t).unwrap();
            assert!(certify_dualizable(&t, &f).pass(), "n = {n}");
        }
    }

    #[test]
    fn unsigned_variant_fails() {
        let t = build_algebra_with(3, FieldSpec::rationals(), SocleSignConvention::Unsigned).unwrap();
        let f = associated_form(&t).unwrap();
        let r = certify_dualizable(&t, &f);
        assert!(!r.arrow_condition.pass);
        assert!(!r.symmetry.pass);
        assert!(!r.double_dual.pass);
    }
}
