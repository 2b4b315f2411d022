use proptest::prelude::*;
use qsylv::decomp::{pinv, rank, Tol};
use qsylv::harness::{planted, seeded};
use qsylv::io::{instance_document, parse_instance, to_text, Problem};
use qsylv::qmatrix::unembed;
use qsylv::solvers::{solve_left, Opts};
use qsylv::{Eta, QMatrix, Quaternion};

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(|[w, x, y, z]| Quaternion::new(w, x, y, z))
}

fn eta() -> impl Strategy<Value = Eta> {
    prop::sample::select(Eta::ALL.to_vec())
}

fn matrix(max: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(m, n, seed)| QMatrix::random(m, n, &mut seeded(seed)))
}

fn close(a: Quaternion, b: Quaternion, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #[test]
    fn product_is_associative_and_norm_multiplicative(p in quaternion(), q in quaternion(), r in quaternion()) {
        let scale = p.abs() * q.abs() * r.abs();
        prop_assert!(close((p * q) * r, p * (q * r), scale));
        prop_assert!(((p * q).abs() - p.abs() * q.abs()).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn conjugation_reverses_products(p in quaternion(), q in quaternion(), e in eta()) {
        let scale = p.abs() * q.abs();
        prop_assert!(close((p * q).conj(), q.conj() * p.conj(), scale));
        prop_assert!(close((p * q).eta_conj(e), q.eta_conj(e) * p.eta_conj(e), scale));
        prop_assert!(close(p.eta_conj(e).eta_conj(e), p, p.abs()));
    }

    #[test]
    fn inverse_is_two_sided(p in quaternion()) {
        prop_assume!(p.abs() > 1e-3);
        let inv = p.inv().unwrap();
        prop_assert!(close(p * inv, Quaternion::ONE, 1.0));
        prop_assert!(close(inv * p, Quaternion::ONE, 1.0));
    }

    #[test]
    fn embedding_is_multiplicative(seed in any::<u64>(), m in 1usize..5, k in 1usize..5, n in 1usize..5) {
        let mut rng = seeded(seed);
        let a = QMatrix::random(m, k, &mut rng);
        let b = QMatrix::random(k, n, &mut rng);
        let via = unembed(&a.embed().mul(&b.embed()).unwrap()).unwrap();
        prop_assert!(via.max_diff(&(&a * &b)) <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
        prop_assert_eq!(unembed(&a.embed()).unwrap(), a);
    }

    #[test]
    fn eta_transpose_reverses_products(seed in any::<u64>(), e in eta()) {
        let mut rng = seeded(seed);
        let a = QMatrix::random(3, 2, &mut rng);
        let b = QMatrix::random(2, 4, &mut rng);
        let lhs = (&a * &b).eta_conj_transpose(e);
        let rhs = &b.eta_conj_transpose(e) * &a.eta_conj_transpose(e);
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose(a in matrix(6)) {
        let b = pinv(&a, Tol::Auto).unwrap();
        let x = &b.pinv;
        let s = 1.0 + a.frobenius_norm() * x.frobenius_norm();
        prop_assert!((&(&(&a * x) * &a) - &a).frobenius_norm() <= 1e-11 * s * a.frobenius_norm());
        prop_assert!((&(&(x * &a) * x) - x).frobenius_norm() <= 1e-11 * s * x.frobenius_norm());
        prop_assert_eq!(b.rank, rank(&a, Tol::Auto).unwrap());
        prop_assert_eq!(b.rank, a.rows().min(a.cols()));
    }

    #[test]
    fn left_equation_family_members_solve(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (a, c, _) = planted::left(&mut rng, 5);
        let fam = solve_left(&a, &c, &Opts::default()).unwrap().into_family().unwrap();
        let x = fam.assemble(&fam.random_params(&mut rng)).unwrap();
        let r = (&(&a * &x) - &c).frobenius_norm();
        prop_assert!(r <= 1e-9 * (1.0 + a.frobenius_norm() + c.frobenius_norm()));
    }

    #[test]
    fn instance_documents_round_trip(seed in any::<u64>()) {
        let (inst, _) = planted::mixed(&mut seeded(seed), 4);
        let problem = Problem::Mixed(inst);
        let text = to_text(&instance_document(&problem));
        let back = parse_instance(&text, None, None).unwrap();
        prop_assert_eq!(&back, &problem);
        prop_assert_eq!(to_text(&instance_document(&back)), text);
    }
}
