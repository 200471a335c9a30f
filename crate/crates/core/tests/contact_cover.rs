use proptest::prelude::*;

use contopo::contact::audits::run_audit;
use contopo::contact::{field_of_hamiltonian, hamiltonian_of_field, OneForm, ScalarField};
use contopo::cover::rat::{q, qi, Q};
use contopo::cover::{cube_at, neighborhoods, Space};
use contopo::poly::Poly;

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-2.0f64..2.0, 0u32..=2, 0u32..=2, 0u32..=1), 1..5).prop_map(|ts| {
        ts.into_iter().fold(Poly::zero(3), |acc, (c, a, b, e)| acc.add(&Poly::monomial(c, vec![a, b, e])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// H -> X_H -> alpha(X_H) gives H back.
    #[test]
    fn hamiltonian_round_trip(h in small_poly(), p in prop::array::uniform3(-2.0f64..2.0)) {
        let form = OneForm::standard(1);
        let hf = ScalarField::from_poly("H", h);
        let x = field_of_hamiltonian(&hf, &form).unwrap();
        let back = hamiltonian_of_field(&x, &form).unwrap();
        prop_assert!((back.eval(&p) - hf.eval(&p)).abs() < 1e-9 * (1.0 + hf.eval(&p).abs()));
    }

    #[test]
    fn audits_pass_for_any_seed(seed in any::<u64>()) {
        for name in ["psi-normalizer", "jet-standard", "dilation"] {
            let r = run_audit(name, 64, 1e-9, seed).unwrap();
            prop_assert!(r.pass(), "{name}: {}", r.report.max_residual);
        }
    }

    /// Two points in distinct cubes of one color are separated by N2-disjoint neighbourhoods.
    #[test]
    fn same_color_cubes_keep_apart(
        d in 1usize..=3,
        a in prop::collection::vec(-60i128..60, 3),
        b in prop::collection::vec(-60i128..60, 3),
    ) {
        let s = q(1, 3);
        let pa: Vec<Q> = a[..d].iter().map(|&v| q(v, 7)).collect();
        let pb: Vec<Q> = b[..d].iter().map(|&v| q(v, 7)).collect();
        let ca = cube_at(&pa, d, s).unwrap();
        let cb = cube_at(&pb, d, s).unwrap();
        prop_assert!(ca.to_box().contains_point(&pa, Space::Euclidean));
        if ca != cb && ca.color() == cb.color() {
            prop_assert!(ca.to_box().chebyshev_dist(&cb.to_box()) >= s / qi(d as i128));
            prop_assert!(!neighborhoods(&ca).1.meets(&neighborhoods(&cb).1, Space::Euclidean));
        }
    }
}
