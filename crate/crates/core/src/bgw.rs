//! Closed-form genus-zero quantities of the generalized BGW free energy:
//! the series `Q`, `F_0`, `y = Q^2` with its `T1`-jets, and `u = -2 log Q`.

use crate::error::Result;
use crate::kdv::{pole_to_power, reduced_ring, GbgwLayout, LinearConstraint};
use crate::psdo::Derivation;
use crate::series::{int, rat, solve_fixed_point, ExactSeries, Rational, Ring};

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(int(1), |acc, k| acc * int(k))
}

fn x_of(ring: &Ring) -> Result<ExactSeries> {
    ExactSeries::var(ring, "X")?.try_sub(&ExactSeries::constant(ring, int(2)))
}

/// `sum_{a >= first} T_{2a+1} Q^{2a+1} / a!`.
fn time_sum(q: &ExactSeries, times: &[String], first: usize) -> Result<ExactSeries> {
    let ring = q.ring();
    let mut out = ExactSeries::zero(ring);
    let q2 = q.pow(2);
    let mut qp = q.clone();
    for (a, t) in times.iter().enumerate() {
        if a >= first {
            let term = ExactSeries::var(ring, t)?.try_mul(&qp)?;
            out = out.try_add(&term.scale(&factorial(a as u32).recip()))?;
        }
        qp = qp.try_mul(&q2)?;
    }
    Ok(out)
}

/// `Q = -x/2 + sum_a T_{2a+1} Q^{2a+1} / a!` over a ring with `X` and the
/// listed times (`T1` first).
pub fn solve_q(ring: &Ring, times: &[String]) -> Result<ExactSeries> {
    let start = x_of(ring)?.scale(&rat(-1, 2));
    solve_fixed_point(|q| start.try_add(&time_sum(q, times, 0)?), &start)
}

/// The same `Q` over the pole ring, where `s = 1/(1 - T1)`:
/// `Q = s (-x/2 + sum_{a >= 1} T_{2a+1} Q^{2a+1} / a!)`.
pub fn solve_q_pole(pole: &Ring, times: &[String]) -> Result<ExactSeries> {
    let s = ExactSeries::var(pole, "s")?;
    let start = x_of(pole)?.scale(&rat(-1, 2));
    let seed = start.try_mul(&s)?;
    solve_fixed_point(
        |q| start.try_add(&time_sum(q, times, 1)?)?.try_mul(&s),
        &seed,
    )
}

fn tilde(ring: &Ring, times: &[String], a: usize) -> Result<ExactSeries> {
    let t = ExactSeries::var(ring, &times[a])?;
    if a == 0 {
        t.try_sub(&ExactSeries::one(ring))
    } else {
        Ok(t)
    }
}

/// `F_0` in closed form, with `~T_1 = T_1 - 1`:
/// `1/2 sum ~T_a ~T_b Q^{2a+2b+2}/(a! b! (a+b+1))
///  - x sum ~T_b Q^{2b+1}/(b! (2b+1)) + x^2/4 log Q`.
pub fn build_f0(q: &ExactSeries, times: &[String]) -> Result<ExactSeries> {
    let ring = q.ring();
    let x = x_of(ring)?;
    let n = times.len();
    let powers: Vec<ExactSeries> = (0..=4 * n).map(|k| q.pow(k as u32)).collect();
    let mut out = ExactSeries::zero(ring);
    for a in 0..n {
        let ta = tilde(ring, times, a)?;
        for b in 0..n {
            let tb = tilde(ring, times, b)?;
            let c = (factorial(a as u32) * factorial(b as u32) * int((a + b + 1) as i64)).recip();
            let term = ta.try_mul(&tb)?.try_mul(&powers[2 * a + 2 * b + 2])?;
            out = out.try_add(&term.scale(&(c * rat(1, 2))))?;
        }
        let c = (factorial(a as u32) * int(2 * a as i64 + 1)).recip();
        let term = x.try_mul(&ta)?.try_mul(&powers[2 * a + 1])?;
        out = out.try_sub(&term.scale(&c))?;
    }
    let log_term = x.pow(2).try_mul(&q.log_unit()?)?.scale(&rat(1, 4));
    out.try_add(&log_term)
}

/// `d^k y / dT1^k` for `k = 0..=kmax`, computed exactly over the pole ring
/// and then expanded over `ring`.
pub fn y_jets(layout: &GbgwLayout, ring: &Ring, kmax: usize) -> Result<Vec<ExactSeries>> {
    let pole = layout.pole_ring()?;
    let q = solve_q_pole(&pole, &layout.time_names())?;
    let jets = Derivation::Pole("s".into()).jets(&q.pow(2), kmax)?;
    jets.iter()
        .map(|j| pole_to_power(j, "s", "T1", ring))
        .collect()
}

/// Everything genus-zero, over [`GbgwLayout::ring`].
#[derive(Clone, Debug)]
pub struct GenusZeroData {
    pub q: ExactSeries,
    pub f0: ExactSeries,
    pub y: ExactSeries,
    pub y_jets: Vec<ExactSeries>,
    pub u: ExactSeries,
}

/// Genus-zero data with `y`-jets up to order `3G - 2`.
pub fn genus_zero(layout: &GbgwLayout) -> Result<GenusZeroData> {
    let ring = layout.ring()?;
    let times = layout.time_names();
    let q = solve_q(&ring, &times)?;
    let f0 = build_f0(&q, &times)?;
    let kmax = (3 * layout.genus).saturating_sub(2).max(1) as usize;
    let y_jets = y_jets(layout, &ring, kmax)?;
    let u = q.log_unit()?.scale(&int(-2));
    Ok(GenusZeroData {
        y: y_jets[0].clone(),
        q,
        f0,
        y_jets,
        u,
    })
}

/// Residual of the defining equation of `Q`.
pub fn euler_lagrange_residual(q: &ExactSeries, times: &[String]) -> Result<ExactSeries> {
    let start = x_of(q.ring())?.scale(&rat(-1, 2));
    q.try_sub(&start.try_add(&time_sum(q, times, 0)?)?)
}

/// Residuals of `dQ/dT_{2a+1} + (2/a!) Q^{2a+1} dQ/dx`, one per time.
pub fn flow_q_residuals(q: &ExactSeries, times: &[String]) -> Result<Vec<ExactSeries>> {
    let ring = q.ring();
    let qx = q.derive("X")?;
    let mut out = Vec::new();
    for (a, t) in times.iter().enumerate() {
        let low = reduced_ring(ring, &[("X", 1), (t.as_str(), 1)])?;
        let rhs = q.pow(2 * a as u32 + 1).try_mul(&qx)?.scale(&(int(2) / factorial(a as u32)));
        out.push(q.derive(t)?.try_add(&rhs)?.truncated_to(&low)?);
    }
    Ok(out)
}

/// Residuals of the second derivatives of `F_0` against their closed
/// forms in `Q`: all `(T_{2a+1}, T_{2b+1})` pairs with `a <= b`, then all
/// `(x, T_{2b+1})`, then `(x, x)`.
pub fn second_derivative_residuals(
    f0: &ExactSeries,
    q: &ExactSeries,
    times: &[String],
) -> Result<Vec<ExactSeries>> {
    let ring = f0.ring();
    let mut out = Vec::new();
    for a in 0..times.len() {
        for b in a..times.len() {
            let low = reduced_ring(ring, &[(times[a].as_str(), 1), (times[b].as_str(), 1)])?;
            let lhs = f0.derive(&times[a])?.derive(&times[b])?;
            let c = (factorial(a as u32) * factorial(b as u32) * int((a + b + 1) as i64)).recip();
            let rhs = q.pow(2 * (a + b) as u32 + 2).scale(&c);
            out.push(lhs.try_sub(&rhs)?.truncated_to(&low)?);
        }
    }
    for (b, t) in times.iter().enumerate() {
        let low = reduced_ring(ring, &[("X", 1), (t.as_str(), 1)])?;
        let lhs = f0.derive("X")?.derive(t)?;
        let c = (factorial(b as u32) * int(2 * b as i64 + 1)).recip();
        let rhs = q.pow(2 * b as u32 + 1).scale(&-c);
        out.push(lhs.try_sub(&rhs)?.truncated_to(&low)?);
    }
    let low = reduced_ring(ring, &[("X", 2)])?;
    let lhs = f0.derive("X")?.derive("X")?;
    let rhs = q.log_unit()?.scale(&rat(1, 2));
    out.push(lhs.try_sub(&rhs)?.truncated_to(&low)?);
    Ok(out)
}

/// L0 and dilaton residuals of a genus-zero free energy.
pub fn genus0_constraints_check(
    f0: &ExactSeries,
    l0: &LinearConstraint,
    dilaton: &LinearConstraint,
) -> Result<(ExactSeries, ExactSeries)> {
    Ok((l0.residual(0, f0)?, dilaton.residual(0, f0)?))
}

/// Residuals of the relations among `u`, `y` and `F_0`:
/// `u + log y`, `u + 4 d^2F_0/dx^2`, `u_x + y_x / y`,
/// `y_x + y_{T1} / (2 y^{1/2})` and `y^{1/2} - Q`.
pub fn u_y_relations(data: &GenusZeroData) -> Result<Vec<ExactSeries>> {
    let ring = data.q.ring();
    let lx = reduced_ring(ring, &[("X", 1)])?;
    let lxt = reduced_ring(ring, &[("X", 1), ("T1", 1)])?;
    let lxx = reduced_ring(ring, &[("X", 2)])?;
    let y = &data.y;
    let root = y.sqrt_unit()?;
    let yx = y.derive("X")?;
    let yt = &data.y_jets[1];
    Ok(vec![
        data.u.try_add(&y.log_unit()?)?,
        data.u
            .try_add(&data.f0.derive("X")?.derive("X")?.scale(&int(4)))?
            .truncated_to(&lxx)?,
        data.u
            .derive("X")?
            .try_add(&yx.try_mul(&y.invert_unit()?)?)?
            .truncated_to(&lx)?,
        yx.try_add(&yt.try_mul(&root.invert_unit()?)?.scale(&rat(1, 2)))?
            .truncated_to(&lxt)?,
        root.try_sub(&data.q)?,
    ])
}
