use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabnull_core::circuit::random::{random_clifford, random_clifford_t};
use stabnull_core::nullity::{compute_s_state, compute_s_unitary, stab_group, subgroup_p_u};
use stabnull_core::theorems::{f_brute, f_closed_form};
use stabnull_core::{
    build_unitary, Circuit, ExactMatrix, ExactScalar, LabelSubgroup, Matrix, PauliLabel, PhasedPauli, Scalar,
    StateVector,
};

fn label(n: usize) -> impl Strategy<Value = PauliLabel> {
    (0..1u64 << (2 * n)).prop_map(move |i| PauliLabel::from_index(n, i).unwrap())
}

fn labels_on_same_n() -> impl Strategy<Value = (PauliLabel, PauliLabel, PauliLabel)> {
    (1usize..=4).prop_flat_map(|n| (label(n), label(n), label(n)))
}

fn ct_circuit(max_n: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| random_clifford_t(n, 4 * n + 6, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn exact(c: &Circuit) -> ExactMatrix {
    build_unitary(c).unwrap()
}

/// `tr(σ_u U σ_v U†) / 2^n` by dense products.
fn ptm_entry_dense(u: &ExactMatrix, a: &PauliLabel, b: &PauliLabel) -> ExactScalar {
    let sa: ExactMatrix = a.to_dense().unwrap();
    let sb: ExactMatrix = b.to_dense().unwrap();
    let tr = sa.mul(u).unwrap().mul(&sb).unwrap().mul(&u.adjoint()).unwrap().trace();
    tr.mul_ref(&ExactScalar::inv_sqrt2_pow(2 * u.n() as u32))
}

fn exact_scalar() -> impl Strategy<Value = ExactScalar> {
    (prop::array::uniform4(-20i64..20), 0u32..6).prop_map(|(c, k)| ExactScalar::from_ints(c, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_abelian_and_associative((a, b, c) in labels_on_same_n()) {
        prop_assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(a.compose(&a).unwrap().is_identity());
    }

    #[test]
    fn phased_compose_matches_dense_product(
        (a, b, _) in labels_on_same_n(),
        pa in 0u8..4,
        pb in 0u8..4,
    ) {
        let (x, y) = (PhasedPauli::new(a, pa), PhasedPauli::new(b, pb));
        let product: Matrix<ExactScalar> = x.to_dense::<ExactScalar>().unwrap().mul(&y.to_dense().unwrap()).unwrap();
        prop_assert_eq!(x.compose(&y).unwrap().to_dense::<ExactScalar>().unwrap(), product);
    }

    #[test]
    fn commutation_matches_dense((a, b, _) in labels_on_same_n()) {
        let (da, db): (ExactMatrix, ExactMatrix) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        let commute = da.mul(&db).unwrap() == db.mul(&da).unwrap();
        prop_assert_eq!(a.commutes_with(&b), commute);
    }

    #[test]
    fn label_text_round_trip((a, _, _) in labels_on_same_n()) {
        prop_assert_eq!(a.to_string().parse::<PauliLabel>().unwrap(), a);
        prop_assert_eq!(PauliLabel::from_index(a.n(), a.index()).unwrap(), a);
    }

    #[test]
    fn exact_canonical_form_is_idempotent(x in exact_scalar(), y in exact_scalar()) {
        let again = ExactScalar::new(x.coeffs().clone(), x.sqrt2_exp());
        prop_assert_eq!(&again, &x);
        let z = x.mul_ref(&y);
        let want = x.to_c64() * y.to_c64();
        prop_assert!((z.to_c64() - want).norm() < 1e-9 * (1.0 + want.norm()));
        let s = x.clone() + y.clone();
        prop_assert!((s.to_c64() - (x.to_c64() + y.to_c64())).norm() < 1e-9 * (1.0 + s.to_c64().norm()));
        prop_assert!((x.clone() - x.clone()).is_zero());
        prop_assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn s_values_are_powers_of_two_with_closed_support(c in ct_circuit(3)) {
        let u = exact(&c);
        let r = compute_s_unitary(&u).unwrap();
        prop_assert!(r.s.is_power_of_two());
        let us: Vec<_> = r.entries.iter().map(|e| e.u).collect();
        let span = LabelSubgroup::span(c.width(), &us).unwrap();
        prop_assert_eq!(span.size(), r.s as u128);
        prop_assert_eq!(subgroup_p_u(&u).unwrap().size(), r.s as u128);
    }

    #[test]
    fn detection_matches_dense_trace_oracle(c in ct_circuit(2)) {
        let u = exact(&c);
        let mut units = 0u64;
        for a in PauliLabel::all(c.width()) {
            for b in PauliLabel::all(c.width()) {
                if ptm_entry_dense(&u, &a, &b).sign_if_unit().is_some() {
                    units += 1;
                }
            }
        }
        prop_assert_eq!(compute_s_unitary(&u).unwrap().s, units);
    }

    #[test]
    fn clifford_invariance(c in ct_circuit(3), seed in any::<u64>()) {
        let cl = random_clifford(c.width(), 10, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = compute_s_unitary(&exact(&c)).unwrap().s;
        prop_assert_eq!(compute_s_unitary(&exact(&c.then(&cl).unwrap())).unwrap().s, s);
        prop_assert_eq!(compute_s_unitary(&exact(&cl.then(&c).unwrap())).unwrap().s, s);
        prop_assert_eq!(compute_s_unitary(&exact(&c).adjoint()).unwrap().s, s);
    }

    #[test]
    fn backends_agree(c in ct_circuit(3)) {
        let se = compute_s_unitary(&exact(&c)).unwrap().s;
        let sf = compute_s_unitary(&build_unitary::<Complex64>(&c).unwrap()).unwrap().s;
        prop_assert_eq!(se, sf);
    }

    #[test]
    fn stab_group_size_is_state_s(c in ct_circuit(3)) {
        let psi = stabnull_core::circuit::apply_to_state(&c, &StateVector::<ExactScalar>::zero_state(c.width())).unwrap();
        let g = stab_group(&psi).unwrap();
        prop_assert_eq!(g.len() as u64, compute_s_state(&psi).unwrap().s);
        for p in &g {
            prop_assert_eq!(p.to_dense::<ExactScalar>().unwrap().apply(&psi).unwrap(), psi.clone());
        }
    }

    #[test]
    fn lagrange_identity(
        n in 1usize..=4,
        ga in prop::collection::vec(any::<u64>(), 0..6),
        gb in prop::collection::vec(any::<u64>(), 0..6),
    ) {
        let mk = |g: &[u64]| {
            let ls: Vec<_> = g.iter().map(|i| PauliLabel::from_index(n, i % (1 << (2 * n))).unwrap()).collect();
            LabelSubgroup::span(n, &ls).unwrap()
        };
        let (a, b) = (mk(&ga), mk(&gb));
        let inter = a.intersect(&b).unwrap();
        let prod = a.product_set_size(&b).unwrap() as u128;
        prop_assert_eq!(a.size() * b.size(), inter.size() * prod);
        for x in inter.elements().unwrap() {
            prop_assert!(a.contains(&x) && b.contains(&x));
        }
    }

    #[test]
    fn f_closed_form_matches_sum(
        n in 1usize..=6,
        bits in prop::collection::vec(any::<bool>(), 18),
    ) {
        let (q, s, p) = (&bits[0..n], &bits[6..6 + n], &bits[12..12 + n]);
        prop_assert_eq!(f_closed_form(q, s, p).unwrap(), f_brute(q, s, p).unwrap());
    }

    #[test]
    fn circuit_text_round_trip(c in ct_circuit(4)) {
        let text = c.to_text().unwrap();
        prop_assert_eq!(text.parse::<Circuit>().unwrap(), c);
    }

    #[test]
    fn exact_and_float_unitaries_agree(c in ct_circuit(3)) {
        let e = exact(&c).to_float();
        let f = build_unitary::<Complex64>(&c).unwrap();
        prop_assert!(e.max_norm_diff(&f) < 1e-10);
        prop_assert!(exact(&c).is_unitary());
        let id = Matrix::<ExactScalar>::identity(c.width());
        prop_assert_eq!(exact(&c).mul(&exact(&c).adjoint()).unwrap(), id);
    }
}
