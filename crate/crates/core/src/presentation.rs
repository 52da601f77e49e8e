//! Generator/relation presentations of `HH^*` and their verification
//! against the computed product structure.

use serde::Serialize;

use crate::exactla::{ExactMatrix, FieldError, FieldSpec, Scalar};
use crate::yoneda::{CohomologyClass, Generator, YonedaEngine, YonedaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `char ∤ 2n+1`.
    Generic,
    /// `char | 2n+1`.
    Modular,
}

/// An integer combination of monomials in the generators.
pub type Poly = Vec<(i64, Vec<Generator>)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub label: String,
    pub lhs: Poly,
    pub rhs: Poly,
    /// Consequences checked in addition to the defining relations.
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub n: usize,
    pub field: FieldSpec,
    pub regime: Regime,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationStatus {
    pub label: String,
    pub derived: bool,
    pub degree: usize,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeAudit {
    pub degree: usize,
    pub spanned: usize,
    pub dimension: usize,
    pub expected: usize,
}

impl DegreeAudit {
    pub fn pass(&self) -> bool {
        self.spanned == self.dimension && self.dimension == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub characteristic: u64,
    pub regime: Regime,
    pub generators: Vec<(String, usize)>,
    pub relations: Vec<RelationStatus>,
    pub audit: Vec<DegreeAudit>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .relations
            .iter()
            .filter(|r| !r.holds)
            .map(|r| format!("relation {} fails", r.label))
            .collect();
        out.extend(
            self.audit
                .iter()
                .filter(|a| !a.pass())
                .map(|a| format!("degree {}: spanned {} of {} (expected {})", a.degree, a.spanned, a.dimension, a.expected)),
        );
        out
    }
}

pub fn regime(n: usize, field: FieldSpec) -> Regime {
    if field.divides(2 * n as i64 + 1) {
        Regime::Modular
    } else {
        Regime::Generic
    }
}

fn mono(gens: &[Generator]) -> Poly {
    vec![(1, gens.to_vec())]
}

fn scaled(c: i64, gens: Vec<Generator>) -> Poly {
    if c == 0 {
        Vec::new()
    } else {
        vec![(c, gens)]
    }
}

fn x0_pow(k: usize) -> Vec<Generator> {
    vec![Generator::X(0); k]
}

fn with_prefix(k: usize, rest: &[Generator]) -> Vec<Generator> {
    let mut v = x0_pow(k);
    v.extend_from_slice(rest);
    v
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn rel(label: String, lhs: Poly, rhs: Poly, derived: bool) -> Relation {
    Relation { label, lhs, rhs, derived }
}

/// The presentation for `n` over the field of the given characteristic.
pub fn presentation_for(n: usize, characteristic: u64) -> Result<Presentation, FieldError> {
    let field = FieldSpec::new(characteristic)?;
    Ok(presentation_in(n, field))
}

pub fn presentation_in(n: usize, field: FieldSpec) -> Presentation {
    use Generator::*;
    let regime = regime(n, field);
    let top = n - 1;
    let mut generators: Vec<Generator> = (0..=n).map(X).collect();
    generators.push(Y);
    generators.extend((1..=n).map(Z));
    if regime == Regime::Modular {
        generators.extend((1..n).map(T));
    }
    generators.push(Gamma);
    generators.push(H);

    let mut relations = Vec::new();
    for i in 1..=n {
        for g in &generators {
            relations.push(rel(format!("i) x{i}*{} = 0", g.name()), mono(&[X(i), *g]), vec![], false));
        }
    }
    relations.push(rel(format!("ii) x0^{n} = 0"), mono(&x0_pow(n)), vec![], false));
    relations.push(rel("ii) y^2 = 0".into(), mono(&[Y, Y]), vec![], false));
    for j in 1..=n {
        relations.push(rel(format!("ii) x0*z{j} = 0"), mono(&[X(0), Z(j)]), vec![], false));
    }
    if regime == Regime::Modular {
        for i in 1..n {
            relations.push(rel(format!("ii) x0*t{i} = 0"), mono(&[X(0), T(i)]), vec![], false));
            relations.push(rel(format!("ii) y*t{i} = 0"), mono(&[Y, T(i)]), vec![], false));
            for k in 1..n {
                relations.push(rel(format!("ii) t{i}*t{k} = 0"), mono(&[T(i), T(k)]), vec![], false));
            }
        }
    }
    for j in 1..=n {
        for k in j..=n {
            let c = sign((k - j + 1) as i64) * (2 * j as i64 - 1) * (n - k + 1) as i64;
            relations.push(rel(
                format!("iii) z{j}*z{k} = {c}*x0^{top}*gamma"),
                mono(&[Z(j), Z(k)]),
                scaled(c, with_prefix(top, &[Gamma])),
                false,
            ));
        }
    }
    for j in 1..=n {
        let c = sign(j as i64) * (n - j + 1) as i64;
        relations.push(rel(
            format!("iv) z{j}*gamma = {c}*x0^{top}*h"),
            mono(&[Z(j), Gamma]),
            scaled(c, with_prefix(top, &[H])),
            false,
        ));
    }
    relations.push(rel("v) gamma^2 = z1*h".into(), mono(&[Gamma, Gamma]), mono(&[Z(1), H]), false));

    match regime {
        Regime::Modular => {
            for j in 1..=n {
                let c = sign(j as i64 - 1) * (2 * j as i64 - 1);
                relations.push(rel(
                    format!("vi) y*z{j} = {c}*y*z1"),
                    mono(&[Y, Z(j)]),
                    scaled(c, vec![Y, Z(1)]),
                    false,
                ));
            }
            for k in 1..=n {
                for j in 1..n {
                    relations.push(z_t_relation(n, k, j, false));
                }
            }
            for j in 1..n {
                relations.push(t_gamma_relation(n, j, false));
            }
        }
        Regime::Generic => {
            // y z_j expands over the degree-3 classes t_i through C.
            let c = crate::yoneda::c_matrix_closed(n);
            for j in 1..=n {
                let rhs: Poly = (1..=n).flat_map(|i| scaled(c[i - 1][j - 1], vec![T(i)])).collect();
                relations.push(rel(format!("vi) y*z{j} = sum_i C[i][{j}]*t_i"), mono(&[Y, Z(j)]), rhs, true));
            }
            for k in 1..=n {
                for j in 1..=n {
                    relations.push(z_t_relation(n, k, j, true));
                }
            }
            for j in 1..=n {
                relations.push(t_gamma_relation(n, j, true));
            }
        }
    }

    Presentation {
        n,
        field,
        regime,
        generators,
        relations,
    }
}

fn z_t_relation(n: usize, k: usize, j: usize, derived: bool) -> Relation {
    use Generator::*;
    let rhs = if j == k {
        mono(&with_prefix(n - 1, &[Y, Gamma]))
    } else {
        Vec::new()
    };
    let d = if j == k { 1 } else { 0 };
    rel(format!("vii) z{k}*t{j} = {d}*x0^{}*y*gamma", n - 1), mono(&[Z(k), T(j)]), rhs, derived)
}

fn t_gamma_relation(n: usize, j: usize, derived: bool) -> Relation {
    use Generator::*;
    let rhs = if j == 1 {
        mono(&with_prefix(n - 1, &[Y, H]))
    } else {
        Vec::new()
    };
    let d = if j == 1 { 1 } else { 0 };
    rel(format!("viii) t{j}*gamma = {d}*x0^{}*y*h", n - 1), mono(&[T(j), Gamma]), rhs, derived)
}

fn poly_degree(p: &Poly) -> Option<usize> {
    p.first().map(|(_, m)| m.iter().map(Generator::degree).sum())
}

/// Evaluates an integer combination of monomials as a class of degree `d`.
pub fn evaluate(engine: &YonedaEngine, p: &Poly, d: usize) -> Result<CohomologyClass, YonedaError> {
    let field = engine.field();
    let len = engine.complex.canonical(d).labels.len();
    let mut acc = CohomologyClass {
        degree: d,
        coords: vec![field.zero(); len],
    };
    for (c, m) in p {
        let v = engine.monomial(m)?;
        assert_eq!(v.degree, d, "inhomogeneous relation");
        acc = acc.add(&v.scale(&field.from_i64(*c)));
    }
    Ok(acc)
}

fn coords_text(c: &CohomologyClass) -> Vec<String> {
    c.coords.iter().map(Scalar::to_exact_string).collect()
}

pub fn check_relation(engine: &YonedaEngine, r: &Relation) -> Result<RelationStatus, YonedaError> {
    let d = poly_degree(&r.lhs).or(poly_degree(&r.rhs)).unwrap_or(0);
    let lhs = evaluate(engine, &r.lhs, d)?;
    let rhs = evaluate(engine, &r.rhs, d)?;
    Ok(RelationStatus {
        label: r.label.clone(),
        derived: r.derived,
        degree: d,
        holds: lhs == rhs,
        lhs: coords_text(&lhs),
        rhs: coords_text(&rhs),
    })
}

/// Span of generator monomials in each degree `0..=upto`.
pub fn dimension_audit(engine: &YonedaEngine, generators: &[Generator], upto: usize) -> Result<Vec<DegreeAudit>, YonedaError> {
    let n = engine.algebra().n();
    let field = engine.field();
    let degree_zero: Vec<Generator> = generators.iter().copied().filter(|g| g.degree() == 0).collect();
    let mut spans: Vec<Vec<CohomologyClass>> = Vec::with_capacity(upto + 1);
    let mut out = Vec::with_capacity(upto + 1);
    for d in 0..=upto {
        let mut found: Vec<CohomologyClass> = Vec::new();
        if d == 0 {
            found.push(engine.unit());
        }
        for g in generators {
            let gd = g.degree();
            if gd == 0 || gd > d {
                continue;
            }
            for v in &spans[d - gd] {
                found.push(engine.times_generator(v, *g)?);
            }
        }
        let mut basis = reduce_span(field, &found);
        loop {
            let before = basis.len();
            let mut more = basis.clone();
            for v in &basis {
                for g in &degree_zero {
                    more.push(engine.times_generator(v, *g)?);
                }
            }
            basis = reduce_span(field, &more);
            if basis.len() == before {
                break;
            }
        }
        let dimension = engine.complex.canonical(d).labels.len();
        out.push(DegreeAudit {
            degree: d,
            spanned: basis.len(),
            dimension,
            expected: if d == 0 { 2 * n } else { n },
        });
        spans.push(basis);
    }
    Ok(out)
}

/// A basis of the span, chosen among the given classes.
fn reduce_span(field: FieldSpec, vs: &[CohomologyClass]) -> Vec<CohomologyClass> {
    let Some(first) = vs.first() else {
        return Vec::new();
    };
    let rows = first.coords.len();
    let cols: Vec<Vec<Scalar>> = vs.iter().map(|v| v.coords.clone()).collect();
    let m = ExactMatrix::from_columns(field, rows, &cols);
    m.echelonize().pivots.iter().map(|&p| vs[p].clone()).collect()
}

pub fn verify(pres: &Presentation, engine: &YonedaEngine, upto: usize) -> Result<VerificationReport, YonedaError> {
    let relations = pres
        .relations
        .iter()
        .map(|r| check_relation(engine, r))
        .collect::<Result<Vec<_>, _>>()?;
    let audit = dimension_audit(engine, &pres.generators, upto)?;
    let pass = relations.iter().all(|r| r.holds) && audit.iter().all(DegreeAudit::pass);
    Ok(VerificationReport {
        n: pres.n,
        characteristic: pres.field.characteristic(),
        regime: pres.regime,
        generators: pres.generators.iter().map(|g| (g.name(), g.degree())).collect(),
        relations,
        audit,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableReport {
    /// `(i, rank of h· on HH^i, dim HH^i, dim HH^{i+6})` for `i = 1..=6`.
    pub bijections: Vec<(usize, usize, usize, usize)>,
    pub degree_zero_kernel: usize,
    pub kernel_is_socle: bool,
    pub top_power_survives: bool,
}

impl StableReport {
    pub fn pass(&self) -> bool {
        self.bijections.iter().all(|&(_, r, a, b)| r == a && a == b) && self.kernel_is_socle && self.top_power_survives
    }
}

fn multiplication_matrix(engine: &YonedaEngine, d: usize, g: Generator) -> Result<ExactMatrix, YonedaError> {
    let field = engine.field();
    let len = engine.complex.canonical(d).labels.len();
    let target = engine.complex.canonical(d + g.degree()).labels.len();
    let cols = (0..len)
        .map(|i| engine.basis_times_generator(d, i, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExactMatrix::from_columns(field, target, &cols))
}

/// Multiplication by `h` against the stable ring: bijective in positive
/// degrees, with kernel exactly the socle classes in degree 0.
pub fn stable_check(engine: &YonedaEngine) -> Result<StableReport, YonedaError> {
    let n = engine.algebra().n();
    let mut bijections = Vec::new();
    for i in 1..=6 {
        let m = multiplication_matrix(engine, i, Generator::H)?;
        bijections.push((i, m.rank(), m.cols(), m.rows()));
    }
    let m0 = multiplication_matrix(engine, 0, Generator::H)?;
    let kernel = m0.kernel_basis();
    // The socle classes x_1..x_n sit at canonical indices n..2n.
    let in_socle = kernel.iter().all(|v| v[..n].iter().all(Scalar::is_zero));
    let top = engine.monomial(&[vec![Generator::X(0); n - 1], vec![Generator::H]].concat())?;
    Ok(StableReport {
        bijections,
        degree_zero_kernel: kernel.len(),
        kernel_is_socle: in_socle && kernel.len() == n,
        top_power_survives: !top.is_zero(),
    })
}

/// The product identities singled out for direct checking, with the
/// vanishing of `HH^3 · HH^odd` inside the window.
pub fn product_lemmas(engine: &YonedaEngine) -> Result<Vec<RelationStatus>, YonedaError> {
    use Generator::*;
    let n = engine.algebra().n();
    let mut rels = vec![
        rel("y^2 = 0".into(), mono(&[Y, Y]), vec![], false),
        rel("gamma^2 = z1*h".into(), mono(&[Gamma, Gamma]), mono(&[Z(1), H]), false),
    ];
    for j in 1..=n {
        let c = sign(j as i64) * (n - j + 1) as i64;
        rels.push(rel(
            format!("z{j}*gamma = {c}*x0^{}*h", n - 1),
            mono(&[Z(j), Gamma]),
            scaled(c, with_prefix(n - 1, &[H])),
            false,
        ));
    }
    for k in 1..=n {
        for j in 1..=n {
            rels.push(z_t_relation(n, k, j, false));
        }
    }
    for j in 1..=n {
        rels.push(t_gamma_relation(n, j, false));
    }
    let mut out = rels
        .iter()
        .map(|r| check_relation(engine, r))
        .collect::<Result<Vec<_>, _>>()?;
    for odd in [1usize, 3, 5] {
        let m = multiplication_classes(engine, 3, odd)?;
        out.push(RelationStatus {
            label: format!("HH^3 * HH^{odd} = 0"),
            derived: false,
            degree: 3 + odd,
            holds: m.iter().all(|c| c.is_zero()),
            lhs: Vec::new(),
            rhs: Vec::new(),
        });
    }
    Ok(out)
}

/// All products of canonical basis elements of degrees `p` and `q`.
fn multiplication_classes(engine: &YonedaEngine, p: usize, q: usize) -> Result<Vec<CohomologyClass>, YonedaError> {
    let lp = engine.complex.canonical(p).labels.len();
    let lq = engine.complex.canonical(q).labels.len();
    let mut out = Vec::new();
    for i in 0..lp {
        for j in 0..lq {
            out.push(engine.cup(&engine.basis_class(p, i), &engine.basis_class(q, j))?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingAxioms {
    pub commutativity_failures: Vec<String>,
    pub associativity_failures: Vec<String>,
    pub lift_independence_failures: Vec<String>,
    pub triples_checked: usize,
}

impl RingAxioms {
    pub fn pass(&self) -> bool {
        self.commutativity_failures.is_empty()
            && self.associativity_failures.is_empty()
            && self.lift_independence_failures.is_empty()
    }
}

/// Graded commutativity on generator pairs, associativity on generator
/// triples of total degree at most `max_triple`, and agreement with a
/// second engine that picks different lifts.
pub fn ring_axioms(engine: &YonedaEngine, other: &YonedaEngine, generators: &[Generator], max_triple: usize) -> Result<RingAxioms, YonedaError> {
    let mut comm = Vec::new();
    let mut assoc = Vec::new();
    let mut indep = Vec::new();
    let field = engine.field();
    for a in generators {
        for b in generators {
            let ab = engine.monomial(&[*a, *b])?;
            let ba = engine.monomial(&[*b, *a])?;
            let s = field.from_i64(sign((a.degree() * b.degree()) as i64));
            if ab != ba.scale(&s) {
                comm.push(format!("{}*{}", a.name(), b.name()));
            }
            if other.monomial(&[*a, *b])? != ab {
                indep.push(format!("{}*{}", a.name(), b.name()));
            }
        }
    }
    let mut triples = 0;
    for a in generators {
        for b in generators {
            for c in generators {
                if a.degree() + b.degree() + c.degree() > max_triple {
                    continue;
                }
                triples += 1;
                let left = engine.monomial(&[*a, *b, *c])?;
                let bc = engine.monomial(&[*b, *c])?;
                let right = engine.cup(&engine.generator_class(*a), &bc)?;
                if left != right {
                    assoc.push(format!("{}*{}*{}", a.name(), b.name(), c.name()));
                }
            }
        }
    }
    Ok(RingAxioms {
        commutativity_failures: comm,
        associativity_failures: assoc,
        lift_independence_failures: indep,
        triples_checked: triples,
    })
}

/// The generator set used when checking ring axioms: every generator of
/// the generic presentation together with all degree-3 classes.
pub fn all_generators(n: usize) -> Vec<Generator> {
    use Generator::*;
    let mut g: Vec<Generator> = (0..=n).map(X).collect();
    g.push(Y);
    g.extend((1..=n).map(Z));
    g.extend((1..=n).map(T));
    g.push(Gamma);
    g.push(H);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::cochain::CochainComplex;
    use crate::nakayama::associated_form;
    use crate::resolution::Resolution;
    use std::sync::Arc;

    fn engine(n: usize, p: u64) -> YonedaEngine {
        let t = Arc::new(build_algebra(n, FieldSpec::new(p).unwrap()).unwrap());
        let f = associated_form(&t).unwrap();
        let res = Arc::new(Resolution::new(t, &f));
        YonedaEngine::new(Arc::new(CochainComplex::new(res).unwrap()))
    }

    #[test]
    fn regimes() {
        assert_eq!(presentation_for(2, 0).unwrap().regime, Regime::Generic);
        assert_eq!(presentation_for(2, 5).unwrap().regime, Regime::Modular);
        assert_eq!(presentation_for(3, 7).unwrap().regime, Regime::Modular);
        assert!(presentation_for(2, 2).is_err());
    }

    #[test]
    fn evaluated_coefficients() {
        let s = presentation_for(2, 0).unwrap();
        let r = s.relations.iter().find(|r| r.label.starts_with("iii) z1*z2")).unwrap();
        assert_eq!(r.rhs, vec![(1, vec![Generator::X(0), Generator::Gamma])]);
        let s = presentation_for(2, 5).unwrap();
        let r = s.relations.iter().find(|r| r.label.starts_with("vi) y*z2")).unwrap();
        assert_eq!(r.rhs, vec![(-3, vec![Generator::Y, Generator::Z(1)])]);
    }

    #[test]
    fn small_presentations_verify() {
        for (n, p) in [(1, 0), (2, 0), (2, 3), (2, 5), (3, 7)] {
            let e = engine(n, p);
            let pres = presentation_for(n, p).unwrap();
            let rep = verify(&pres, &e, 12).unwrap();
            assert!(rep.pass, "n={n} p={p}: {:?}", rep.failures());
        }
    }

    #[test]
    fn stable_and_lemmas_small() {
        let e = engine(2, 0);
        assert!(stable_check(&e).unwrap().pass());
        assert!(product_lemmas(&e).unwrap().iter().all(|r| r.holds));
    }

    #[test]
    fn ring_axioms_small() {
        let t = Arc::new(build_algebra(2, FieldSpec::rationals()).unwrap());
        let f = associated_form(&t).unwrap();
        let c = Arc::new(CochainComplex::new(Arc::new(Resolution::new(t, &f))).unwrap());
        let a = YonedaEngine::new(c.clone());
        let b = YonedaEngine::with_order(c, crate::exactla::PivotOrder::Reversed);
        let r = ring_axioms(&a, &b, &all_generators(2), 8).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}
