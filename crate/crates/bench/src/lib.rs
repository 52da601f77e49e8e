//! Benchmark fixtures shared by the criterion targets.

use std::sync::Arc;

use preproj_core::cochain::CochainComplex;
use preproj_core::nakayama::associated_form;
use preproj_core::resolution::Resolution;
use preproj_core::{build_algebra, AlgebraTable, FieldSpec};

/// The algebra for `n` vertices over the field of characteristic `p`.
pub fn algebra(n: usize, p: u64) -> AlgebraTable {
    build_algebra(n, FieldSpec::new(p).expect("valid characteristic")).expect("algebra builds")
}

/// The periodic cochain complex for `n` vertices.
pub fn complex(n: usize, p: u64) -> Arc<CochainComplex> {
    let t = Arc::new(algebra(n, p));
    let f = associated_form(&t).expect("form exists");
    Arc::new(CochainComplex::new(Arc::new(Resolution::new(t, &f))).expect("complex builds"))
}
