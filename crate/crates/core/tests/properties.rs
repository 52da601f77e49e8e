use proptest::prelude::*;

use preproj_core::exactla::{ExactMatrix, FieldSpec, LinearSolver, PivotOrder};

fn fields() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::rationals()),
        Just(FieldSpec::new(3).unwrap()),
        Just(FieldSpec::new(5).unwrap()),
        Just(FieldSpec::new(7).unwrap()),
    ]
}

fn matrix() -> impl Strategy<Value = ExactMatrix> {
    (fields(), 1usize..7, 1usize..7).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)
            .prop_map(move |rows| ExactMatrix::from_i64_rows(f, &rows))
    })
}

proptest! {
    #[test]
    fn rank_is_transpose_invariant(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_nullity(m in matrix()) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solutions_solve(m in matrix(), seed in prop::collection::vec(-2i64..=2, 6)) {
        let f = m.field();
        let x: Vec<_> = (0..m.cols()).map(|i| f.from_i64(seed[i % seed.len()])).collect();
        let b = m.mul_vec(&x);
        for order in [PivotOrder::Natural, PivotOrder::Reversed] {
            let y = m.solve_with(&b, order).expect("consistent system");
            prop_assert_eq!(m.mul_vec(&y), b.clone());
            let z = LinearSolver::new(&m, order).solve(&b).expect("consistent system");
            prop_assert_eq!(m.mul_vec(&z), b.clone());
        }
    }

    #[test]
    fn solver_rejects_outside_image(m in matrix()) {
        let f = m.field();
        let s = LinearSolver::new(&m, PivotOrder::Natural);
        for r in 0..m.rows() {
            let mut e = vec![f.zero(); m.rows()];
            e[r] = f.one();
            let in_image = {
                let mut cols: Vec<_> = (0..m.cols()).map(|c| m.column(c)).collect();
                cols.push(e.clone());
                ExactMatrix::from_columns(f, m.rows(), &cols).rank() == m.rank()
            };
            prop_assert_eq!(s.solve(&e).is_some(), in_image);
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in prop::collection::vec(-3i64..=3, 9), b in prop::collection::vec(-3i64..=3, 9)) {
        let q = FieldSpec::rationals();
        let to = |v: &[i64]| ExactMatrix::from_i64_rows(q, &[v[0..3].to_vec(), v[3..6].to_vec(), v[6..9].to_vec()]);
        let (ma, mb) = (to(&a), to(&b));
        prop_assert_eq!(ma.mul(&mb).determinant(), &ma.determinant() * &mb.determinant());
    }
}
