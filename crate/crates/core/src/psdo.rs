//! Pseudodifferential operators for the KdV Lax operator.
//!
//! Operators are stored as `sum_k a_k D^k` with `D = hbar * d/dx`, so that
//! every coefficient is a power series in `hbar` with nonnegative exponents:
//! commuting `D` past a coefficient gives `D a = a D + hbar a'`. The `D^{-1}`
//! coefficient of an operator is therefore `hbar` times its `d^{-1}` residue.
//!
//! Truncation below order `-K` is tracked: every operator records the lowest
//! order from which its coefficients are exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::series::{int, ExactSeries, Rational, Ring};

/// How the spatial derivative acts on a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// Plain partial derivative in the named variable.
    Partial(String),
    /// The named variable is `s = 1/(1 - T)` for a spatial coordinate `T`,
    /// so `d/dT = s^2 d/ds`.
    Pole(String),
    /// Total derivative on jet variables `{prefix}0, {prefix}1, ...`:
    /// `D u_k = u_{k+1}`.
    Jet { prefix: String, count: usize },
}

impl Derivation {
    pub fn apply(&self, s: &ExactSeries) -> Result<ExactSeries> {
        match self {
            Derivation::Partial(v) => s.derive(v),
            Derivation::Pole(v) => {
                let d = s.derive(v)?;
                d.shift(v, 2)
            }
            Derivation::Jet { prefix, count } => {
                let ring = s.ring();
                let idx: Vec<usize> = (0..*count)
                    .map(|k| ring.index_of(&format!("{prefix}{k}")))
                    .collect::<Result<_>>()?;
                let mut out = ExactSeries::zero(ring);
                for (m, c) in s.terms() {
                    for k in 0..*count {
                        let e = m.get(idx[k]);
                        if e == 0 {
                            continue;
                        }
                        if k + 1 >= *count {
                            return Err(Error::JetOverflow {
                                needed: k + 1,
                                available: count - 1,
                            });
                        }
                        let mut t = m.clone();
                        t.exps_mut()[idx[k]] -= 1;
                        t.exps_mut()[idx[k + 1]] += 1;
                        out.add_term(t, c * BigInt::from(e));
                    }
                }
                Ok(out)
            }
        }
    }

    /// `[u, u', u'', ...]` up to and including order `n`.
    pub fn jets(&self, u: &ExactSeries, n: usize) -> Result<Vec<ExactSeries>> {
        let mut out = vec![u.clone()];
        for k in 0..n {
            let next = self.apply(&out[k])?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Spatial derivation, name of the `hbar` variable, and the cutoff `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaxConfig {
    pub spatial: Derivation,
    pub hbar: String,
    pub cutoff: i32,
}

impl LaxConfig {
    /// Configuration able to carry flows up to `max_flow`; cutoff `2 i + 3`.
    pub fn for_flows(spatial: Derivation, hbar: impl Into<String>, max_flow: u32) -> Self {
        LaxConfig {
            spatial,
            hbar: hbar.into(),
            cutoff: 2 * max_flow as i32 + 3,
        }
    }

    pub fn required_cutoff(flow: u32) -> i32 {
        2 * flow as i32 + 2
    }
}

const EXACT: i32 = i32::MIN / 4;

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoDiffOp {
    ring: Ring,
    config: LaxConfig,
    coeffs: BTreeMap<i32, ExactSeries>,
    valid_from: i32,
}

impl PseudoDiffOp {
    pub fn zero(ring: &Ring, config: &LaxConfig) -> Self {
        PseudoDiffOp {
            ring: ring.clone(),
            config: config.clone(),
            coeffs: BTreeMap::new(),
            valid_from: EXACT,
        }
    }

    /// `a D^k`, exact.
    pub fn monomial(a: ExactSeries, k: i32, config: &LaxConfig) -> Self {
        let mut op = PseudoDiffOp::zero(a.ring(), config);
        op.set(k, a);
        op
    }

    /// `D^k`.
    pub fn d_power(ring: &Ring, k: i32, config: &LaxConfig) -> Self {
        Self::monomial(ExactSeries::one(ring), k, config)
    }

    /// `L = D^2 + 2u`.
    pub fn lax(u: &ExactSeries, config: &LaxConfig) -> Self {
        let mut op = Self::d_power(u.ring(), 2, config);
        op.set(0, u.scale(&int(2)));
        op
    }

    fn set(&mut self, k: i32, a: ExactSeries) {
        if k < -self.config.cutoff || a.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, a);
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn config(&self) -> &LaxConfig {
        &self.config
    }

    /// Lowest order whose coefficient is known exactly.
    pub fn valid_from(&self) -> i32 {
        self.valid_from.max(-self.config.cutoff)
    }

    pub fn is_exact(&self) -> bool {
        self.valid_from == EXACT
    }

    pub fn top_order(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i32) -> ExactSeries {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| ExactSeries::zero(&self.ring))
    }

    pub fn orders(&self) -> impl Iterator<Item = (i32, &ExactSeries)> {
        self.coeffs.iter().map(|(k, a)| (*k, a))
    }

    fn compatible(&self, other: &PseudoDiffOp) -> Result<()> {
        if self.config != other.config {
            return Err(Error::ConfigMismatch(format!(
                "{:?} vs {:?}",
                self.config, other.config
            )));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.describe(),
                right: other.ring.describe(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PseudoDiffOp) -> Result<PseudoDiffOp> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (k, a) in &other.coeffs {
            let sum = out.coeff(*k).try_add(a)?;
            out.set(*k, sum);
        }
        out.valid_from = self.valid_from.max(other.valid_from);
        Ok(out)
    }

    pub fn sub(&self, other: &PseudoDiffOp) -> Result<PseudoDiffOp> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> PseudoDiffOp {
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(k, a)| (*k, a.scale(c)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        out
    }

    /// Product by the Leibniz rule `D^i b = sum_n C(i, n) hbar^n b^(n) D^(i-n)`.
    pub fn mul(&self, other: &PseudoDiffOp) -> Result<PseudoDiffOp> {
        self.compatible(other)?;
        let cutoff = self.config.cutoff;
        let mut out = PseudoDiffOp::zero(&self.ring, &self.config);
        let (Some(top_a), Some(top_b)) = (self.top_order(), other.top_order()) else {
            out.valid_from = self.valid_from.max(other.valid_from);
            return Ok(out);
        };
        out.valid_from = match (self.is_exact(), other.is_exact()) {
            (true, true) => EXACT,
            (true, false) => other.valid_from + top_a,
            (false, true) => self.valid_from + top_b,
            (false, false) => (self.valid_from + top_b).max(other.valid_from + top_a),
        };
        let hbar = &self.config.hbar;
        let mut truncated = false;
        let mut acc: BTreeMap<i32, ExactSeries> = BTreeMap::new();
        for (&j, b) in &other.coeffs {
            // hbar^n b^(n), built lazily
            let mut derivs: Vec<ExactSeries> = vec![b.clone()];
            for (&i, a) in &self.coeffs {
                let mut n: i32 = 0;
                let mut binom = Rational::one();
                loop {
                    if i >= 0 && n > i {
                        break;
                    }
                    let order = i + j - n;
                    if order < -cutoff {
                        truncated = true;
                        break;
                    }
                    while derivs.len() <= n as usize {
                        let last = derivs.last().unwrap().shift(hbar, 1)?;
                        derivs.push(self.config.spatial.apply(&last)?);
                    }
                    let w = &derivs[n as usize];
                    if w.is_zero() {
                        // higher derivatives vanish as well
                        break;
                    }
                    let term = a.try_mul(w)?.scale(&binom);
                    let slot = acc
                        .entry(order)
                        .or_insert_with(|| ExactSeries::zero(&self.ring));
                    *slot = slot.try_add(&term)?;
                    // C(i, n+1) = C(i, n) (i - n) / (n + 1)
                    binom = binom * BigInt::from(i - n) / BigInt::from(n + 1);
                    n += 1;
                }
            }
        }
        if truncated {
            out.valid_from = out.valid_from.max(-cutoff);
        }
        for (k, a) in acc {
            out.set(k, a);
        }
        Ok(out)
    }

    /// Orders `>= 0`. Requires the order-0 coefficient to be exact.
    pub fn plus_part(&self) -> Result<PseudoDiffOp> {
        if self.valid_from() > 0 {
            return Err(Error::CutoffTooSmall {
                required: self.config.cutoff + self.valid_from(),
                have: self.config.cutoff,
            });
        }
        let mut out = PseudoDiffOp::zero(&self.ring, &self.config);
        for (k, a) in self.coeffs.range(0..) {
            out.set(*k, a.clone());
        }
        Ok(out)
    }

    /// Coefficient of `D^{-1}`.
    pub fn residue(&self) -> Result<ExactSeries> {
        if self.valid_from() > -1 {
            return Err(Error::CutoffTooSmall {
                required: self.config.cutoff + self.valid_from() + 1,
                have: self.config.cutoff,
            });
        }
        Ok(self.coeff(-1))
    }

    pub fn commutator(&self, other: &PseudoDiffOp) -> Result<PseudoDiffOp> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Drops coefficients below `valid_from`, which are not meaningful.
    fn trim(mut self) -> Self {
        let v = self.valid_from();
        self.coeffs.retain(|k, _| *k >= v);
        self
    }
}

fn check_lax_form(l: &PseudoDiffOp) -> Result<ExactSeries> {
    let ring = l.ring();
    let ok = l.coeff(2) == ExactSeries::one(ring)
        && l.coeff(1).is_zero()
        && l.orders().all(|(k, _)| (0..=2).contains(&k))
        && l.is_exact();
    if !ok {
        return Err(Error::InvalidArgument(
            "operator is not of the form D^2 + 2u".into(),
        ));
    }
    Ok(l.coeff(0).scale(&Rational::new(1.into(), 2.into())))
}

/// The square root `D + u D^{-1} + ...` of `L = D^2 + 2u`, down to `D^{-K}`.
pub fn sqrt_lax(l: &PseudoDiffOp) -> Result<PseudoDiffOp> {
    check_lax_form(l)?;
    let config = l.config().clone();
    let ring = l.ring().clone();
    let k_max = config.cutoff;
    let mut p = PseudoDiffOp::d_power(&ring, 1, &config);
    let mut square = p.mul(&p)?;
    let half = Rational::new(1.into(), 2.into());
    for k in 0..=k_max {
        let residual = l.sub(&square)?;
        let a = residual.coeff(1 - k).scale(&half);
        if a.is_zero() {
            continue;
        }
        let step = PseudoDiffOp::monomial(a, -k, &config);
        // (p + s)^2 = p^2 + p s + s p + s^2
        square = square
            .add(&p.mul(&step)?)?
            .add(&step.mul(&p)?)?
            .add(&step.mul(&step)?)?;
        p = p.add(&step)?;
    }
    p.valid_from = -k_max;
    let p = p.trim();
    // square-back check on the orders the truncation determines
    let back = p.mul(&p)?.sub(l)?;
    for (k, a) in back.orders() {
        if k > -k_max && !a.is_zero() {
            return Err(Error::Invariant(format!(
                "square root residual at order {k}: {a}"
            )));
        }
    }
    Ok(p)
}

/// `L^{(2i+1)/2} = sqrt(L) L^i`.
pub fn odd_power(l: &PseudoDiffOp, i: u32) -> Result<PseudoDiffOp> {
    let required = LaxConfig::required_cutoff(i);
    if l.config().cutoff < required {
        return Err(Error::CutoffTooSmall {
            required,
            have: l.config().cutoff,
        });
    }
    let mut p = sqrt_lax(l)?;
    for _ in 0..i {
        p = p.mul(l)?.trim();
    }
    Ok(p)
}

pub(crate) fn double_factorial(n: u32) -> BigInt {
    let mut out = BigInt::one();
    let mut k = n;
    while k > 1 {
        out *= BigInt::from(k);
        k -= 2;
    }
    out
}

/// Order-zero part of `(1/(2 hbar)) [ (L^{(2i+1)/2})_+, L ] / (2i+1)!!`,
/// checked to have no positive orders and only even powers of `hbar`.
pub fn flow_from_powers(
    power: &PseudoDiffOp,
    l: &PseudoDiffOp,
    i: u32,
) -> Result<ExactSeries> {
    let bracket = power.plus_part()?.commutator(l)?;
    for (k, a) in bracket.orders() {
        if k != 0 && !a.is_zero() {
            return Err(Error::Invariant(format!(
                "flow {i}: bracket has nonzero order {k}"
            )));
        }
    }
    let hbar = &l.config().hbar;
    let c0 = bracket.coeff(0).unshift(hbar, 1)?;
    let norm = Rational::from_integer(double_factorial(2 * i + 1) * BigInt::from(2));
    let rhs = c0.scale(&norm.recip());
    assert_even_hbar(&rhs, hbar, &format!("flow {i}"))?;
    Ok(rhs)
}

pub(crate) fn assert_even_hbar(s: &ExactSeries, hbar: &str, what: &str) -> Result<()> {
    let h = s.ring().index_of(hbar)?;
    if let Some((m, _)) = s.terms().find(|(m, _)| m.get(h) % 2 == 1) {
        return Err(Error::Invariant(format!(
            "{what}: odd power of {hbar} in {}",
            s.format_monomial(m)
        )));
    }
    Ok(())
}

/// Right-hand side of the `T_{2i+1}` flow, computed directly with operators
/// over the ring of `u`. Exact through `hbar^{cap - 1}`.
pub fn kdv_rhs(u: &ExactSeries, i: u32, config: &LaxConfig) -> Result<ExactSeries> {
    let l = PseudoDiffOp::lax(u, config);
    let power = odd_power(&l, i)?;
    flow_from_powers(&power, &l, i)
}

/// `res L^{(2b+1)/2} / (2b+1)!!` (the `D^{-1}` coefficient).
pub fn density_from_power(power: &PseudoDiffOp, b: u32) -> Result<ExactSeries> {
    let r = power.residue()?;
    Ok(r.scale(&Rational::from_integer(double_factorial(2 * b + 1)).recip()))
}

#[cfg(test)]
mod tests;
