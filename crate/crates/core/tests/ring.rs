use std::sync::Arc;

use preproj_core::algebra::build_algebra;
use preproj_core::cochain::CochainComplex;
use preproj_core::exactla::PivotOrder;
use preproj_core::nakayama::associated_form;
use preproj_core::presentation::{all_generators, ring_axioms};
use preproj_core::resolution::Resolution;
use preproj_core::yoneda::{Generator, YonedaEngine};
use preproj_core::FieldSpec;

fn engines(n: usize, p: u64) -> (YonedaEngine, YonedaEngine) {
    let t = Arc::new(build_algebra(n, FieldSpec::new(p).unwrap()).unwrap());
    let f = associated_form(&t).unwrap();
    let c = Arc::new(CochainComplex::new(Arc::new(Resolution::new(t, &f))).unwrap());
    (YonedaEngine::new(c.clone()), YonedaEngine::with_order(c, PivotOrder::Reversed))
}

#[test]
fn axioms_through_degree_twelve() {
    for (n, p) in [(1, 0), (2, 0), (2, 5)] {
        let (a, b) = engines(n, p);
        let r = ring_axioms(&a, &b, &all_generators(n), 12).unwrap();
        assert!(r.pass(), "n={n} p={p}: {r:?}");
    }
}

#[test]
fn axioms_for_three_vertices() {
    let (a, b) = engines(3, 7);
    let r = ring_axioms(&a, &b, &all_generators(3), 9).unwrap();
    assert!(r.pass(), "{r:?}");
}

#[test]
fn socle_cocycles_identify_with_top_products() {
    // ω_1 in degree 5 and ε^{2n-2} in degree 6 are the top x_0-multiples.
    let n = 3;
    let (e, _) = engines(n, 0);
    let yg = e.monomial(&[vec![Generator::X(0); n - 1], vec![Generator::Y, Generator::Gamma]].concat()).unwrap();
    assert_eq!(yg, e.basis_class(5, n - 1));
    let h = e.monomial(&[vec![Generator::X(0); n - 1], vec![Generator::H]].concat()).unwrap();
    assert_eq!(h, e.basis_class(6, n - 1));
}

#[test]
fn lifts_agree_beyond_the_period() {
    let (a, b) = engines(2, 3);
    for d in 1..=6 {
        for i in 0..2 {
            for g in [Generator::Y, Generator::Z(2), Generator::Gamma, Generator::H] {
                if d + g.degree() > 12 {
                    continue;
                }
                assert_eq!(a.basis_times_generator(d, i, g).unwrap(), b.basis_times_generator(d, i, g).unwrap());
            }
        }
    }
}
