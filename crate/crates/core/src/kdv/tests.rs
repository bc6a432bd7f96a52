use super::*;
use crate::series::{int, rat, ExactSeries, Ring};

fn small_gbgw() -> GbgwLayout {
    GbgwLayout {
        genus: 2,
        times: 2,
        t_order: 3,
        x_order: 3,
    }
}

fn var(r: &Ring, name: &str) -> ExactSeries {
    ExactSeries::var(r, name).unwrap()
}

#[test]
fn flow_table_matches_operator_calculus() {
    let table = FlowTable::new(2, 4).unwrap();
    let r = table.jet_ring().clone();
    let u = |k: usize| var(&r, &format!("u{k}"));
    assert_eq!(table.flow(0).unwrap(), &u(1));
    let expected = &u(0) * &u(1) + (&var(&r, "hbar").pow(2) * &u(3)).scale(&rat(1, 12));
    assert_eq!(table.flow(1).unwrap(), &expected);
    assert_eq!(table.density(0).unwrap(), &u(0));
    // R_1 = u^2/2 + hbar^2 u''/12
    let r1 = u(0).pow(2).scale(&rat(1, 2)) + (&var(&r, "hbar").pow(2) * &u(2)).scale(&rat(1, 12));
    assert_eq!(table.density(1).unwrap(), &r1);
}

#[test]
fn gbgw_initial_data_unchanged_without_flows() {
    let layout = small_gbgw();
    let pole = layout.pole_ring().unwrap();
    let init = InitialData::gbgw(&pole).unwrap();
    let table = layout.flow_table().unwrap();
    assert_eq!(evolve(&init, &[], &table).unwrap(), init.u0);
}

#[test]
fn wk_t1_flow_dispersionless_part() {
    let layout = WkLayout {
        genus: 1,
        times: 2,
        order: 4,
    };
    let ring = layout.ring().unwrap();
    let table = layout.flow_table().unwrap();
    let init = InitialData::wk(&ring).unwrap();
    assert_eq!(evolve(&init, &[], &table).unwrap(), var(&ring, "t0"));
    let u = evolve(&init, &[1], &table).unwrap();
    let t0 = var(&ring, "t0");
    let t1 = var(&ring, "t1");
    let geo = (ExactSeries::one(&ring) - t1).invert_unit().unwrap();
    assert_eq!(u.slice("hbar", 0).unwrap(), &t0 * &geo);
}

#[test]
fn flows_commute() {
    let layout = WkLayout {
        genus: 1,
        times: 3,
        order: 4,
    };
    let ring = layout.ring().unwrap();
    let table = layout.flow_table().unwrap();
    let init = InitialData::wk(&ring).unwrap();
    let a = evolve(&init, &[1, 2, 3], &table).unwrap();
    let b = evolve(&init, &[3, 1, 2], &table).unwrap();
    assert_eq!(a, b);
}

#[test]
fn densities_are_consistent() {
    // d/dT_{2b+1} of the b = 0 density equals d/dT1 of the b density
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let sol = gbgw_solution(&layout, &table).unwrap();
    let ring = sol.u.ring().clone();
    for (v, d) in &sol.densities {
        let low = reduced_ring(&ring, &[("T1", 1), (v.as_str(), 1)]).unwrap();
        let lhs = sol.u.derive(v).unwrap().truncated_to(&low).unwrap();
        let rhs = d.derive("T1").unwrap().truncated_to(&low).unwrap();
        assert_eq!(lhs, rhs, "density {v}");
    }
}

#[test]
fn genus_zero_density_matches_q_power() {
    // hbar^0 part of density b along T1 only: Q^{2b+2}/(b!(b+1)),
    // Q = -x/(2(1 - T1))
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let sol = gbgw_solution(&layout, &table).unwrap();
    let ring = sol.u.ring().clone();
    let x = var(&ring, "X") - ExactSeries::constant(&ring, int(2));
    let s = (ExactSeries::one(&ring) - var(&ring, "T1")).invert_unit().unwrap();
    let q = (&x * &s).scale(&rat(-1, 2));
    let along_t1 = |f: &ExactSeries| f.restrict_zero("T3").unwrap().restrict_zero("T5").unwrap();
    let (_, d1) = &sol.densities[0];
    let got = along_t1(&d1.slice("hbar", 0).unwrap());
    assert_eq!(got, q.pow(4).scale(&rat(1, 2)));
}

#[test]
fn wk_density_b1_at_small_times() {
    let layout = WkLayout {
        genus: 1,
        times: 2,
        order: 3,
    };
    let table = layout.flow_table().unwrap();
    let sol = wk_solution(&layout, &table).unwrap();
    let (_, d1) = &sol.densities[0];
    let mut g0 = d1.slice("hbar", 0).unwrap();
    for t in ["t1", "t2"] {
        g0 = g0.restrict_zero(t).unwrap();
    }
    let t0 = var(sol.u.ring(), "t0");
    assert_eq!(g0, t0.pow(2).scale(&rat(1, 2)));
}

#[test]
fn gbgw_tower_reconstructs() {
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let tower = gbgw_tower(&layout, &table, true).unwrap();
    let ring = tower.ring().clone();
    let at_zero = |f: &ExactSeries| {
        let mut f = f.clone();
        for t in layout.time_names() {
            f = f.restrict_zero(&t).unwrap();
        }
        f
    };
    for g in 0..=2 {
        assert_eq!(
            at_zero(tower.genus(g).unwrap()),
            boundary_value(g, &ring).unwrap(),
            "genus {g}"
        );
    }
    // along T1 only, genus 0: dF0/dT1 = x^2/(4 (1 - T1))
    let x = var(&ring, "X") - ExactSeries::constant(&ring, int(2));
    let s = (ExactSeries::one(&ring) - var(&ring, "T1")).invert_unit().unwrap();
    let p = tower.genus(0).unwrap().derive("T1").unwrap();
    let p = p.restrict_zero("T3").unwrap().restrict_zero("T5").unwrap();
    let expected = (&x.pow(2) * &s).scale(&rat(1, 4));
    let low = reduced_ring(&ring, &[("T1", 1)]).unwrap();
    assert_eq!(
        p.truncated_to(&low).unwrap(),
        expected.truncated_to(&low).unwrap()
    );
    // genus 1 along T1 only: dF1/dT1 = 1/(8 (1 - T1))
    let p1 = tower.genus(1).unwrap().derive("T1").unwrap();
    let p1 = p1.restrict_zero("T3").unwrap().restrict_zero("T5").unwrap();
    assert_eq!(
        p1.truncated_to(&low).unwrap(),
        s.scale(&rat(1, 8)).truncated_to(&low).unwrap()
    );
}

#[test]
fn unpinned_tower_differs_only_at_times_zero() {
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let pinned = gbgw_tower(&layout, &table, true).unwrap();
    let free = gbgw_tower(&layout, &table, false).unwrap();
    let ring = pinned.ring().clone();
    for g in 0..=2 {
        let diff = pinned.genus(g).unwrap() - free.genus(g).unwrap();
        assert_eq!(diff, boundary_value(g, &ring).unwrap(), "genus {g}");
    }
}

#[test]
fn perturbed_tower_fails_checks() {
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let sol = gbgw_solution(&layout, &table).unwrap();
    let constraints = layout.constraints(sol.u.ring()).unwrap();
    let tower = reconstruct_gbgw(&sol, &constraints, 2, true).unwrap();
    let mut bad = constraints.clone();
    bad.l0.inhomogeneous[1] = ExactSeries::zero(sol.u.ring());
    let err = check_tower(&tower, &sol, &bad, true).unwrap_err();
    assert!(matches!(err, crate::Error::Residual { genus: 1, .. }), "{err:?}");
}

#[test]
fn genus0_crosscheck_at_times_zero() {
    let layout = small_gbgw();
    let table = layout.flow_table().unwrap();
    let tower = gbgw_tower(&layout, &table, true).unwrap();
    let ring = tower.ring().clone();
    let mut f0 = tower.genus(0).unwrap().clone();
    for t in layout.time_names() {
        f0 = f0.restrict_zero(&t).unwrap();
    }
    let reference = boundary_value(0, &ring).unwrap();
    assert!((f0 - reference).is_zero());
}
