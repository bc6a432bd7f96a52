use super::*;
use crate::series::{rat, TruncationSpec, VarSpec};

const JETS: usize = 14;

fn jet_ring(hcap: u32) -> Ring {
    let mut vars = vec![VarSpec::new("hbar", 0)];
    vars.extend((0..JETS).map(|k| VarSpec::new(format!("u{k}"), 0)));
    Ring::new(vars, TruncationSpec::new(0).with_cap("hbar", hcap)).unwrap()
}

fn jet_config(max_flow: u32) -> LaxConfig {
    LaxConfig::for_flows(
        Derivation::Jet {
            prefix: "u".into(),
            count: JETS,
        },
        "hbar",
        max_flow,
    )
}

fn u(r: &Ring, k: usize) -> ExactSeries {
    ExactSeries::var(r, &format!("u{k}")).unwrap()
}

fn h(r: &Ring) -> ExactSeries {
    ExactSeries::var(r, "hbar").unwrap()
}

#[test]
fn d_past_coefficient() {
    let r = jet_ring(4);
    let cfg = jet_config(1);
    let d = PseudoDiffOp::d_power(&r, 1, &cfg);
    let a = PseudoDiffOp::monomial(u(&r, 0), 0, &cfg);
    let p = d.mul(&a).unwrap();
    assert_eq!(p.coeff(1), u(&r, 0));
    assert_eq!(p.coeff(0), &h(&r) * &u(&r, 1));
    assert_eq!(p.orders().count(), 2);
    assert!(p.is_exact());
}

#[test]
fn inverse_and_square_of_d() {
    let r = jet_ring(4);
    let cfg = jet_config(1);
    let d = PseudoDiffOp::d_power(&r, 1, &cfg);
    let dinv = PseudoDiffOp::d_power(&r, -1, &cfg);
    assert_eq!(dinv.mul(&d).unwrap(), PseudoDiffOp::d_power(&r, 0, &cfg));
    assert_eq!(d.mul(&dinv).unwrap(), PseudoDiffOp::d_power(&r, 0, &cfg));
    assert_eq!(d.mul(&d).unwrap(), PseudoDiffOp::d_power(&r, 2, &cfg));
}

#[test]
fn commutator_and_residue_of_d() {
    let r = jet_ring(4);
    let cfg = jet_config(1);
    let d = PseudoDiffOp::d_power(&r, 1, &cfg);
    let a = PseudoDiffOp::monomial(u(&r, 0), 0, &cfg);
    let c = d.commutator(&a).unwrap();
    assert_eq!(c, PseudoDiffOp::monomial(&h(&r) * &u(&r, 1), 0, &cfg));
    assert!(d.residue().unwrap().is_zero());
}

#[test]
fn inverse_d_moves_past_coefficient() {
    // D^{-1} u = u D^{-1} - hbar u' D^{-2} + hbar^2 u'' D^{-3} - ...
    let r = jet_ring(4);
    let cfg = jet_config(0);
    let dinv = PseudoDiffOp::d_power(&r, -1, &cfg);
    let a = PseudoDiffOp::monomial(u(&r, 0), 0, &cfg);
    let p = dinv.mul(&a).unwrap();
    assert_eq!(p.coeff(-1), u(&r, 0));
    assert_eq!(p.coeff(-2), -(&h(&r) * &u(&r, 1)));
    assert_eq!(p.coeff(-3), &h(&r).pow(2) * &u(&r, 2));
    assert_eq!(p.valid_from(), -cfg.cutoff);
}

#[test]
fn sqrt_of_free_operator_is_d() {
    let r = jet_ring(4);
    let cfg = jet_config(2);
    let l = PseudoDiffOp::lax(&ExactSeries::zero(&r), &cfg);
    let s = sqrt_lax(&l).unwrap();
    assert_eq!(s.orders().count(), 1);
    assert_eq!(s.coeff(1), ExactSeries::one(&r));
}

#[test]
fn sqrt_leading_terms() {
    let r = jet_ring(6);
    let cfg = jet_config(2);
    let l = PseudoDiffOp::lax(&u(&r, 0), &cfg);
    let s = sqrt_lax(&l).unwrap();
    assert_eq!(s.coeff(1), ExactSeries::one(&r));
    assert!(s.coeff(0).is_zero());
    assert_eq!(s.coeff(-1), u(&r, 0));
    // a_{-2} = -(hbar/2) u'
    assert_eq!(s.coeff(-2), (&h(&r) * &u(&r, 1)).scale(&rat(-1, 2)));
    assert_eq!(s.plus_part().unwrap(), PseudoDiffOp::d_power(&r, 1, &cfg));
    assert_eq!(density_from_power(&s, 0).unwrap(), u(&r, 0));
}

#[test]
fn square_back_of_odd_powers() {
    let r = jet_ring(6);
    let cfg = jet_config(2);
    let l = PseudoDiffOp::lax(&u(&r, 0), &cfg);
    for i in 0..=2 {
        let p = odd_power(&l, i).unwrap();
        let sq = p.mul(&p).unwrap();
        let mut target = PseudoDiffOp::d_power(&r, 0, &cfg);
        for _ in 0..(2 * i + 1) {
            target = target.mul(&l).unwrap();
        }
        let diff = sq.sub(&target).unwrap();
        let floor = sq.valid_from();
        for (k, a) in diff.orders() {
            assert!(k < floor || a.is_zero(), "power {i}, order {k}: {a}");
        }
    }
}

#[test]
fn positive_part_of_three_halves_power() {
    let r = jet_ring(6);
    let cfg = jet_config(1);
    let l = PseudoDiffOp::lax(&u(&r, 0), &cfg);
    let p = odd_power(&l, 1).unwrap().plus_part().unwrap();
    assert_eq!(p.coeff(3), ExactSeries::one(&r));
    assert!(p.coeff(2).is_zero());
    assert_eq!(p.coeff(1), u(&r, 0).scale(&int(3)));
    assert_eq!(p.coeff(0), (&h(&r) * &u(&r, 1)).scale(&rat(3, 2)));
}

#[test]
fn first_two_flows() {
    let r = jet_ring(6);
    let cfg = jet_config(1);
    assert_eq!(kdv_rhs(&u(&r, 0), 0, &cfg).unwrap(), u(&r, 1));
    let expected = &u(&r, 0) * &u(&r, 1) + (&h(&r).pow(2) * &u(&r, 3)).scale(&rat(1, 12));
    assert_eq!(kdv_rhs(&u(&r, 0), 1, &cfg).unwrap(), expected);
}

#[test]
fn dispersionless_limit() {
    // hbar^0 part of the T_{2i+1} flow is u^i u' / i!
    let r = jet_ring(8);
    let cfg = jet_config(3);
    let mut fact = 1i64;
    for i in 0..=3u32 {
        if i > 0 {
            fact *= i as i64;
        }
        let rhs = kdv_rhs(&u(&r, 0), i, &cfg).unwrap();
        let classical = rhs.slice("hbar", 0).unwrap();
        let expected = (&u(&r, 0).pow(i) * &u(&r, 1)).scale(&rat(1, fact));
        assert_eq!(classical, expected, "flow {i}");
    }
}

#[test]
fn partial_derivation_on_polynomial() {
    let r = Ring::new(
        vec![VarSpec::new("x", 0), VarSpec::new("hbar", 0)],
        TruncationSpec::new(0).with_cap("x", 8).with_cap("hbar", 4),
    )
    .unwrap();
    let cfg = LaxConfig::for_flows(Derivation::Partial("x".into()), "hbar", 1);
    let x = ExactSeries::var(&r, "x").unwrap();
    let u0 = x.pow(2);
    // u u' + hbar^2 u'''/12 with u''' = 0
    assert_eq!(kdv_rhs(&u0, 1, &cfg).unwrap(), x.pow(3).scale(&int(2)));
}

#[test]
fn cutoff_too_small_is_reported() {
    let r = jet_ring(4);
    let mut cfg = jet_config(1);
    cfg.cutoff = 3;
    let l = PseudoDiffOp::lax(&u(&r, 0), &cfg);
    assert!(matches!(
        odd_power(&l, 1).unwrap_err(),
        Error::CutoffTooSmall { required: 4, have: 3 }
    ));
}

#[test]
fn non_lax_operator_is_rejected() {
    let r = jet_ring(4);
    let cfg = jet_config(1);
    let d = PseudoDiffOp::d_power(&r, 1, &cfg);
    assert!(matches!(
        sqrt_lax(&d).unwrap_err(),
        Error::InvalidArgument(_)
    ));
}
