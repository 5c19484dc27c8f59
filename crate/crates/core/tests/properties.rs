use std::sync::Arc;

use proptest::prelude::*;

use arcforge::analysis::spectrum;
use arcforge::codes::{code_from_arc, CodeError};
use arcforge::curves::custom_arc;
use arcforge::finite_field::{field_from_descriptor, field_of_order, Elem, FieldContext};
use arcforge::genus::{closure_profile, ClosureCase};
use arcforge::monodromy::{agl1_distribution, pgl2_distribution, specialization_census, FamilyKind};
use arcforge::partition::Partition;
use arcforge::plane::Plane;

const ORDERS: [u64; 12] = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 81];

fn field(order: u64) -> Arc<FieldContext> {
    field_of_order(order).unwrap()
}

fn elem(f: &FieldContext, code: u64) -> Elem {
    f.element(code % f.order()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(i in 0..ORDERS.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = field(ORDERS[i]);
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert!(f.add(a, f.neg(a)).is_zero());
        prop_assert_eq!(f.pow_u64(a, f.order()), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        prop_assert_eq!(f.parse(&f.format(a)).unwrap(), a);
    }

    #[test]
    fn descriptor_round_trip(i in 0..ORDERS.len(), a in any::<u64>(), b in any::<u64>()) {
        let f = field(ORDERS[i]);
        let g = field_from_descriptor(&f.descriptor()).unwrap();
        prop_assert_eq!(g.descriptor(), f.descriptor());
        let (x, y) = (elem(&f, a), elem(&f, b));
        let (u, v) = (g.parse(&f.format(x)).unwrap(), g.parse(&f.format(y)).unwrap());
        prop_assert_eq!(g.format(g.mul(u, v)), f.format(f.mul(x, y)));
    }

    #[test]
    fn partition_canonical_form(parts in prop::collection::vec(1u32..9, 0..12)) {
        let p = Partition::from_parts(parts.clone());
        prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(p.total(), parts.iter().sum::<u32>());
        prop_assert_eq!(p.fixed_points() as usize, parts.iter().filter(|&&x| x == 1).count());
        let mut shuffled = parts;
        shuffled.reverse();
        prop_assert_eq!(&Partition::from_parts(shuffled), &p);
        if !p.is_empty() {
            prop_assert_eq!(p.to_string().parse::<Partition>().unwrap(), p);
        }
    }

    #[test]
    fn census_conservation(seed in any::<u64>(), k in 0..4usize) {
        let kind = [FamilyKind::HermitianLine, FamilyKind::HermitianOnPoint, FamilyKind::BksLine, FamilyKind::BksOnPoint][k];
        let f = field(81);
        let family = kind.seeded_instance(&f, 3, seed).unwrap();
        let c = specialization_census(&f, 3, family).unwrap();
        prop_assert!(c.is_conserved());
        prop_assert!(c.patterns.keys().all(|p| p.total() == c.degree));
    }

    #[test]
    fn gate_is_monotone_in_r(q_idx in 0..10usize, case_idx in 0..5usize, r in 1u32..12) {
        let q = [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16][q_idx];
        let case = [
            ClosureCase::HermitianOffcurve,
            ClosureCase::HermitianOnpoint,
            ClosureCase::BksGeneralDistinct,
            ClosureCase::BksGeneralEqual,
            ClosureCase::BksSpecial,
        ][case_idx];
        prop_assume!(!(case.is_bks() && q % 2 == 0));
        let p = closure_profile(case, q).unwrap();
        if p.gate(r).holds {
            prop_assert!(p.gate(r + 1).holds);
        }
    }

    #[test]
    fn code_distance_is_k_minus_n(i in 0..6usize, picks in prop::collection::vec(any::<u64>(), 4..30)) {
        let f = field([2u64, 3, 4, 5, 7, 8][i]);
        let plane = Plane::new(&f).unwrap();
        let pts: Vec<_> = picks.iter().map(|&c| plane.point_at(c % plane.size()).unwrap()).collect();
        let arc = custom_arc(&plane, &pts).unwrap();
        match code_from_arc(&arc) {
            Err(CodeError::Collinear) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(code) => {
                let s = spectrum(&arc);
                let rep = code.min_distance(Some(&s)).unwrap();
                prop_assert_eq!(rep.enumeration, Some(arc.len() as u64 - s.n() as u64));
            }
        }
    }
}

#[test]
fn group_counts_sum_to_order() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
        let pgl = pgl2_distribution(q).unwrap();
        assert_eq!(pgl.counts.values().sum::<u64>(), pgl.order);
        assert_eq!(pgl.order, q * (q * q - 1));
        let agl = agl1_distribution(q).unwrap();
        assert_eq!(agl.counts.values().sum::<u64>(), agl.order);
        assert_eq!(agl.order, q * (q - 1));
    }
}
