use std::sync::Arc;

use num_bigint::BigUint;
use unitary_core::algebra::{skew_symmetric_basis, GroupAlgebra, GroupInvolution};
use unitary_core::catalog::{build, sweep, sweep_entries};
use unitary_core::unitary::{
    cayley, compute, oracle_unitary_set, s_h_enumerate, s_h_upper_bound, unitary_enumerate_oracle, unitary_order_char2,
    Char2Options, MethodChoice, DEFAULT_SEARCH_CAP,
};
use unitary_core::{make_field, FieldElement, FieldSpec, Group};

fn gf(p: u32, m: u32) -> Arc<FieldSpec> {
    Arc::new(make_field(p, m).unwrap())
}

#[test]
fn quotient_order_two_count() {
    for g in sweep(16, 2) {
        let n2 = g.involution_solutions().len();
        for c in g.central_involutions() {
            let t = g.t_c(c).unwrap().len();
            let h = g.subgroup_generated(&[c]).unwrap();
            let q = g.quotient(&h).unwrap();
            assert_eq!(2 * q.group.involution_solutions().len(), n2 + t, "{} c={c}", g.id());
        }
    }
}

#[test]
fn order_is_independent_of_central_choice() {
    let f = gf(2, 1);
    for g in sweep(16, 2) {
        let a = GroupAlgebra::new(f.clone(), g.clone()).unwrap();
        let star = GroupInvolution::canonical_star(&g);
        let oracle = unitary_enumerate_oracle(&a, &star, DEFAULT_SEARCH_CAP).unwrap().order;
        for c in g.central_involutions() {
            let opts = Char2Options { base_order: g.order() / 2, central_choice: Some(c), ..Default::default() };
            let r = unitary_order_char2(&a, &opts).unwrap();
            assert_eq!(r.order, oracle, "{} c={c}", g.id());
        }
    }
}

#[test]
fn deep_recursion_matches_oracle() {
    let f = gf(2, 1);
    let opts = Char2Options { base_order: 2, ..Default::default() };
    for g in sweep(16, 2).into_iter().filter(|g| g.order() == 16) {
        let a = GroupAlgebra::new(f.clone(), g.clone()).unwrap();
        let star = GroupInvolution::canonical_star(&g);
        let deep = unitary_order_char2(&a, &opts).unwrap();
        let oracle = oracle_unitary_set(&a, &star, DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(deep.order, BigUint::from(oracle.len()), "{}", g.id());
    }
}

#[test]
fn catalog_theta_values() {
    let f = gf(2, 1);
    for e in sweep_entries(16, 2) {
        let g = Arc::new(e.build().unwrap());
        let a = GroupAlgebra::new(f.clone(), g.clone()).unwrap();
        let r = compute(&a, &GroupInvolution::canonical_star(&g), MethodChoice::Auto, &Char2Options::default()).unwrap();
        if let Some(expected) = e.expected.theta {
            assert_eq!(r.theta.clone().unwrap(), num_rational::BigRational::from_integer(expected.into()), "{}", e.name);
        }
        if let Some(n2) = e.expected.involution_solutions {
            assert_eq!(g.involution_solutions().len(), n2, "{}", e.name);
        }
    }
}

#[test]
fn s_h_sizes_for_every_central_involution() {
    let f = gf(2, 1);
    for g in sweep(16, 2) {
        let a = GroupAlgebra::new(f.clone(), g.clone()).unwrap();
        for c in g.central_involutions() {
            let sh = s_h_enumerate(&a, c, &Char2Options::default()).unwrap();
            let t = g.t_c(c).unwrap().len();
            assert!(BigUint::from(sh.s_h.len()) <= s_h_upper_bound(&g, &f, t), "{} c={c}", g.id());
            // fibers of x -> xx^* all have size |V_*(FG)|
            assert_eq!(BigUint::from(sh.unitary_count) * BigUint::from(sh.s_h.len()), sh.fiber_size);
        }
    }
}

fn cayley_round_trip(g: &str, p: u32) {
    let group = Arc::new(build(g).unwrap());
    let a = GroupAlgebra::new(gf(p, 1), group.clone()).unwrap();
    let star = GroupInvolution::canonical_star(&group);
    let basis = skew_symmetric_basis(&a, &star).unwrap();
    let unitary = oracle_unitary_set(&a, &star, DEFAULT_SEARCH_CAP).unwrap();
    let q = a.field().order();
    let total = (q as u64).pow(basis.len() as u32);
    let mut images = Vec::new();
    for idx in 0..total {
        let mut x = a.zero();
        let mut rest = idx;
        for b in &basis {
            x = x.add(&b.scale(FieldElement::from_raw((rest % q as u64) as u32))).unwrap();
            rest /= q as u64;
        }
        let fx = cayley(&x).unwrap();
        assert!(unitary.contains(fx.coeffs()));
        assert_eq!(cayley(&fx).unwrap(), x);
        images.push(fx.into_coeffs());
    }
    images.sort();
    images.dedup();
    assert_eq!(images.len(), unitary.len());
}

#[test]
fn cayley_is_a_bijection() {
    cayley_round_trip("cyclic:3", 3);
    cayley_round_trip("cyclic:9", 3);
    cayley_round_trip("elementary_abelian:3:2", 3);
    cayley_round_trip("cyclic:5", 5);
}

#[test]
fn odd_formula_for_custom_involutions() {
    let f = gf(3, 1);
    for name in ["cyclic:9", "elementary_abelian:3:2"] {
        let g: Arc<Group> = Arc::new(build(name).unwrap());
        let a = GroupAlgebra::new(f.clone(), g.clone()).unwrap();
        for inv in unitary_core::algebra::involutions_arising(&g) {
            let r = compute(&a, &inv, MethodChoice::Auto, &Char2Options::default()).unwrap();
            let moved = g.order() - inv.fixed_points().len();
            assert_eq!(r.order, BigUint::from(3u32).pow((moved / 2) as u32), "{name} {}", inv.descriptor());
        }
    }
}

#[test]
fn gf4_order_16_is_refused() {
    let g = Arc::new(build("dihedral:16").unwrap());
    let a = GroupAlgebra::new(gf(2, 2), g).unwrap();
    let err = unitary_order_char2(&a, &Char2Options::default()).unwrap_err();
    assert!(matches!(err, unitary_core::Error::SearchSpaceTooLarge { .. }), "{err:?}");
}
