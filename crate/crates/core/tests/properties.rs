use cayley_hc::diamond::{eta, eta_prime_at_1, periodic_discriminant, printed_discriminant, DiamondParams};
use cayley_hc::model::STATES;
use cayley_hc::oracle::{finite_measure, BoundaryField, FiniteMeasureSpec, FiniteTree, DEFAULT_BUDGET};
use cayley_hc::recursion::ti_map;
use cayley_hc::uniqueness::{initial_box, narrow_step, theta_of_box, IntervalBox};
use cayley_hc::{FieldVector, RootBranching, TransitionMatrix, TreeShape};
use proptest::prelude::*;

/// Row-stochastic matrix with `P_01, P_02, P_03 > 0`; some entries below
/// row 0 are zeroed.
fn matrix() -> impl Strategy<Value = TransitionMatrix> {
    (prop::array::uniform16(0.05f64..1.0), prop::array::uniform16(any::<bool>())).prop_map(|(w, zero)| {
        let mut m = [[0.0; STATES]; STATES];
        for i in 0..STATES {
            for j in 0..STATES {
                let idx = 4 * i + j;
                m[i][j] = if i > 0 && i != j && zero[idx] && idx % 3 == 0 { 0.0 } else { w[idx] };
            }
            let s: f64 = m[i].iter().sum();
            m[i].iter_mut().for_each(|x| *x /= s);
        }
        TransitionMatrix::new(m).unwrap()
    })
}

fn log_box() -> impl Strategy<Value = IntervalBox> {
    (prop::array::uniform3(-2.0f64..2.0), prop::array::uniform3(0.0f64..2.0)).prop_map(|(lo, w)| {
        let hi: [f64; 3] = std::array::from_fn(|i| lo[i] + w[i]);
        IntervalBox::new(lo.map(f64::exp), hi.map(f64::exp)).unwrap()
    })
}

fn f_direct(p: &TransitionMatrix, i: usize, z: &[f64; 3]) -> f64 {
    let dot = |r: &[f64; 4]| r[0] + r[1] * z[0] + r[2] * z[1] + r[3] * z[2];
    dot(p.row(i)) / dot(p.row(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trivial_law_is_fixed(p in matrix(), k in 1usize..6) {
        let z = ti_map(&p, k, &FieldVector::ones()).unwrap();
        prop_assert!(z.log_norm() < 1e-14);
    }

    #[test]
    fn boxes_are_nested(p in matrix(), k in 2usize..4) {
        let (mut b, _) = initial_box(&p, k, 1e-12).unwrap();
        for _ in 0..20 {
            let (next, _) = narrow_step(&p, k, &b, 1e-12).unwrap();
            prop_assert!(b.contains_box(&next, 1e-12), "{b:?} does not contain {next:?}");
            b = next;
        }
    }

    #[test]
    fn solutions_stay_in_every_box(p in matrix(), k in 2usize..4, h in prop::array::uniform3(-8.0f64..8.0)) {
        // Any image of the map lies in D_1, and images of D_m lie in D_{m+1}.
        let (mut b, _) = initial_box(&p, k, 1e-300).unwrap();
        let mut z = ti_map(&p, k, &FieldVector::from_ln(h).unwrap()).unwrap();
        for _ in 0..5 {
            prop_assert!(b.contains_point(&z.components(), 1e-12));
            b = narrow_step(&p, k, &b, 1e-300).unwrap().0;
            z = ti_map(&p, k, &z).unwrap();
        }
    }

    #[test]
    fn corners_bound_the_box(p in matrix(), b in log_box(), t in prop::array::uniform3(0.0f64..1.0)) {
        let z: [f64; 3] = std::array::from_fn(|i| b.lo[i] + (b.hi[i] - b.lo[i]) * t[i]);
        for i in 1..=3 {
            let c: Vec<f64> = b.corners().iter().map(|c| f_direct(&p, i, c)).collect();
            let mn = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let mx = c.iter().cloned().fold(0.0, f64::max);
            let v = f_direct(&p, i, &z);
            prop_assert!(v <= mx * (1.0 + 1e-12) && v >= mn * (1.0 - 1e-12));
        }
    }

    #[test]
    fn theta_grows_with_the_box(p in matrix(), b in log_box(), grow in prop::array::uniform3(0.0f64..1.0)) {
        let big = IntervalBox::new(
            std::array::from_fn(|i| b.lo[i] * (-grow[i]).exp()),
            std::array::from_fn(|i| b.hi[i] * grow[i].exp()),
        ).unwrap();
        let small = theta_of_box(&p, &b, 17);
        let large = theta_of_box(&p, &big, 17);
        prop_assert!(large >= small - 1e-6, "{large} < {small}");
    }

    #[test]
    fn eta_prime_matches_difference(alpha in 0.02f64..0.98, beta in 0.02f64..0.98, k in prop::sample::select(vec![2usize, 3, 5])) {
        let p = DiamondParams::new(alpha, beta, k).unwrap();
        let h = 1e-7;
        let fd = (eta(1.0 + h, &p).unwrap() - eta(1.0 - h, &p).unwrap()) / (2.0 * h);
        prop_assert!((fd - eta_prime_at_1(&p)).abs() < 1e-5 * eta_prime_at_1(&p).abs().max(1.0));
    }

    #[test]
    fn discriminants_are_symmetric(alpha in 0.01f64..0.99, beta in 0.01f64..0.99) {
        let (a, b) = (1.0 - beta, 1.0 - alpha);
        prop_assert!((printed_discriminant(alpha, beta) - printed_discriminant(a, b)).abs() < 1e-12);
        prop_assert!((periodic_discriminant(alpha, beta) - periodic_discriminant(a, b)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn finite_measures_are_normalised(p in matrix(), h in prop::array::uniform3(-3.0f64..3.0), full in any::<bool>()) {
        let root = if full { RootBranching::FullTree } else { RootBranching::HalfTree };
        let tree = FiniteTree::new(TreeShape::new(2, 2, root).unwrap()).unwrap();
        let field = BoundaryField::Constant(FieldVector::from_ln(h).unwrap());
        let table = finite_measure(&FiniteMeasureSpec::from_field(&p, &tree, &field), &tree, DEFAULT_BUDGET).unwrap();
        prop_assert!((table.total() - 1.0).abs() < 1e-12);
        prop_assert!(table.probs.iter().all(|q| *q >= 0.0));
    }
}
