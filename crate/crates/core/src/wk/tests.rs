use std::sync::OnceLock;

use super::*;
use crate::series::{int, rat, Rational, Ring};

fn genus2() -> &'static WkExpansion {
    static CELL: OnceLock<WkExpansion> = OnceLock::new();
    CELL.get_or_init(|| {
        let layout = WkLayout::for_genus(2);
        wk_tower(&layout, &layout.flow_table().unwrap()).unwrap()
    })
}

fn var(r: &Ring, name: &str) -> ExactSeries {
    ExactSeries::var(r, name).unwrap()
}

fn only_t0(f: &ExactSeries, times: u32) -> ExactSeries {
    (1..=times).fold(f.clone(), |acc, i| acc.restrict_zero(&format!("t{i}")).unwrap())
}

fn known_genus_two() -> JetPolynomial {
    let mut p = JetPolynomial::zero(2);
    p.add_term(vec![-2, 0, 0, 1], rat(1, 1152));
    p.add_term(vec![-3, 1, 1, 0], rat(-7, 1920));
    p.add_term(vec![-4, 3, 0, 0], rat(1, 360));
    p
}

#[test]
fn ansatz_sizes_and_grading() {
    assert!(JetPolynomial::ansatz(1).is_empty());
    assert_eq!(JetPolynomial::ansatz(2).len(), 3);
    assert_eq!(JetPolynomial::ansatz(3).len(), 11);
    for g in 2..=4u32 {
        for m in JetPolynomial::ansatz(g) {
            let s: i32 = m.iter().sum();
            let w: i32 = m.iter().enumerate().map(|(i, e)| (i as i32 + 1) * e).sum();
            assert_eq!((s, w), (1 - g as i32, 2 * g as i32 - 2), "{m:?}");
            assert!(m[1..].iter().all(|&e| e >= 0));
        }
    }
}

#[test]
fn solver_handles_exact_singular_and_inconsistent_systems() {
    let r = WkLayout::for_genus(1).ring().unwrap();
    let a = var(&r, "t0");
    let b = var(&r, "t2");
    let target = a.scale(&int(3)) - b.scale(&rat(1, 2));
    let sol = solve_columns(&[a.clone(), b.clone()], &target).unwrap();
    assert_eq!(sol, vec![int(3), rat(-1, 2)]);
    assert!(matches!(
        solve_columns(&[a.clone(), a.scale(&int(2))], &a),
        Err(Error::LinearSystem(_))
    ));
    assert!(matches!(
        solve_columns(std::slice::from_ref(&a), &b),
        Err(Error::LinearSystem(_))
    ));
}

#[test]
fn genus_zero_along_t0() {
    let wk = genus2();
    let ring = wk.tower.ring();
    let f0 = only_t0(wk.tower.genus(0).unwrap(), 5);
    assert_eq!(f0, var(ring, "t0").pow(3).scale(&rat(1, 6)));
    assert_eq!(only_t0(&wk.v, 5), var(ring, "t0"));
}

#[test]
fn genus_one_t1_coefficient_and_value_at_origin() {
    let wk = genus2();
    let f1 = wk.tower.genus(1).unwrap();
    assert_eq!(f1.coeff_of(&[("t1", 1)]).unwrap(), rat(1, 24));
    assert_eq!(f1.constant_term(), Rational::from_integer(0.into()));
    assert_eq!(fit_jet_polynomial(1, wk).unwrap(), JetPolynomial::genus_one());
}

#[test]
fn genus_two_jet_polynomial() {
    let wk = genus2();
    let p = fit_jet_polynomial(2, wk).unwrap();
    assert_eq!(p, known_genus_two());
    let back = evaluate_jets(&p, &wk.v_jets, None).unwrap();
    assert_eq!(&back, wk.tower.genus(2).unwrap());
}

#[test]
fn genus_zero_and_zero_series_are_rejected() {
    let wk = genus2();
    assert!(fit_jet_polynomial(0, wk).is_err());
    let mut empty = wk.clone();
    let ring = empty.tower.ring().clone();
    empty.tower = crate::kdv::FreeEnergyTower::from_genera(
        empty.tower.provenance,
        empty.tower.u.clone(),
        vec![ExactSeries::zero(&ring); 3],
    );
    assert!(matches!(
        fit_jet_polynomial(2, &empty),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn lemma_identities() {
    for p in [JetPolynomial::genus_one(), known_genus_two()] {
        let (a, b) = p.check_lemma();
        assert!(a.is_zero(), "{a:?}");
        assert!(b.is_zero(), "{b:?}");
    }
    let mut bad = known_genus_two();
    bad.add_term(vec![-1, 0, 0, 0], int(1));
    let (a, b) = bad.check_lemma();
    assert!(!a.is_zero() && !b.is_zero());
}

#[test]
fn evaluate_at_identity_jets_and_unit_checks() {
    let r = WkLayout::for_genus(1).ring().unwrap();
    let one = ExactSeries::one(&r);
    let zero = ExactSeries::zero(&r);
    let jets = vec![zero.clone(), one, zero.clone(), zero.clone(), zero.clone()];
    // only monomials without z_2, z_3, z_4 survive
    let p = known_genus_two();
    assert!(evaluate_jets(&p, &jets, None).unwrap().is_zero());
    let mut q = p.clone();
    q.add_term(vec![-1, 0, 0, 0], rat(5, 7));
    assert_eq!(
        evaluate_jets(&q, &jets, None).unwrap(),
        ExactSeries::constant(&r, rat(5, 7))
    );
    let dead = vec![zero.clone(), zero.clone()];
    assert_eq!(evaluate_jets(&q, &dead, None), Err(Error::NotInvertible));
}

#[test]
fn canonical_text_round_trip() {
    for p in [JetPolynomial::genus_one(), known_genus_two()] {
        let text = p.to_canonical_text();
        assert_eq!(JetPolynomial::from_canonical_text(&text).unwrap(), p);
    }
    assert!(JetPolynomial::from_canonical_text("1,2\t1/2\n").is_err());
}
