//! Both sides of the genus-by-genus identity between the generalized BGW
//! free energies and the Witten–Kontsevich jet polynomials evaluated at the
//! `T1`-jets of `y`, compared exactly, plus the low-genus Hodge checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bgw::{genus_zero, solve_q, GenusZeroData};
use crate::error::{Error, Result};
use crate::kdv::{
    boundary_value, gbgw_tower, reduced_ring, FreeEnergyTower, GbgwLayout, WkLayout,
};
use crate::series::{int, rat, ExactSeries, Rational, Ring};
use crate::wk::{evaluate_jets, JetPolynomial};

/// Ring variable standing for `log 2`.
pub const LOG2: &str = "log2";

/// Which side, if any, receives a deliberate perturbation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fault {
    #[default]
    None,
    Lhs,
    Rhs,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Fault::None),
            "lhs" => Ok(Fault::Lhs),
            "rhs" => Ok(Fault::Rhs),
            other => Err(Error::InvalidArgument(format!(
                "unknown fault `{other}` (expected lhs, rhs or none)"
            ))),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::None => "none",
            Fault::Lhs => "lhs",
            Fault::Rhs => "rhs",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Match,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub genus: u32,
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    pub genus: u32,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
    /// Terms of the left-hand side, a cheap fingerprint of what was compared.
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub gbgw: GbgwLayout,
    pub wk: BTreeMap<u32, WkLayout>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub genus: u32,
    pub status: Status,
    pub truncation: Truncation,
    pub genera: Vec<GenusReport>,
    pub first_mismatch: Option<Mismatch>,
    pub fault: Fault,
    pub wall_time_ms: u64,
    /// Cache keys (with engine version) of every cached input, by name.
    pub input_cache_keys: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn is_match(&self) -> bool {
        self.status == Status::Match
    }
}

/// `F_g - B_g` from a pinned tower.
pub fn lhs_side(tower: &FreeEnergyTower, g: u32) -> Result<ExactSeries> {
    tower.genus(g)?.try_sub(&boundary_value(g, tower.ring())?)
}

/// `P_g(y_{T1}, y_{T1 T1}, ...) - delta_{g,1} log 2 / 24 - B_g`, where at
/// genus one `P_1 = (1/24) log z_1` and `log y_{T1}` tracks `log 2`.
pub fn rhs_side(g: u32, p: &JetPolynomial, y_jets: &[ExactSeries]) -> Result<ExactSeries> {
    if g == 0 || p.genus != g {
        return Err(Error::InvalidArgument(format!(
            "genus {g} needs a genus-{g} jet polynomial, got genus {}",
            p.genus
        )));
    }
    let ring = y_jets
        .first()
        .ok_or_else(|| Error::InvalidArgument("no y-jets".into()))?
        .ring();
    let mut out = evaluate_jets(p, y_jets, Some(LOG2))?;
    if g == 1 {
        out = out.try_sub(&ExactSeries::var(ring, LOG2)?.scale(&rat(1, 24)))?;
    }
    out.try_sub(&boundary_value(g, ring)?)
}

/// Exact comparison; the first differing monomial in ring order is reported.
pub fn compare(g: u32, lhs: &ExactSeries, rhs: &ExactSeries) -> Result<GenusReport> {
    let diff = lhs.try_sub(rhs)?;
    let first_mismatch = diff.first_term().map(|(m, _)| Mismatch {
        genus: g,
        monomial: diff.format_monomial(m),
        lhs: lhs.coeff(m).to_string(),
        rhs: rhs.coeff(m).to_string(),
    });
    Ok(GenusReport {
        genus: g,
        status: if first_mismatch.is_some() {
            Status::Mismatch
        } else {
            Status::Match
        },
        first_mismatch,
        terms: lhs.len(),
    })
}

fn perturbation(ring: &Ring) -> Result<ExactSeries> {
    ExactSeries::term(ring, &[("T1", 1)], rat(1, 7))
}

/// Verifies genera `1..=gbgw.genus` against the given jet polynomials.
pub fn verify(
    gbgw: &GbgwLayout,
    jets: &BTreeMap<u32, JetPolynomial>,
    fault: Fault,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let table = gbgw.flow_table()?;
    let tower = gbgw_tower(gbgw, &table, true)?;
    let data = genus_zero(gbgw)?;
    verify_tower(gbgw, &tower, &data, jets, fault, start)
}

/// As [`verify`], over an already reconstructed tower.
pub fn verify_tower(
    gbgw: &GbgwLayout,
    tower: &FreeEnergyTower,
    data: &GenusZeroData,
    jets: &BTreeMap<u32, JetPolynomial>,
    fault: Fault,
    start: Instant,
) -> Result<VerificationReport> {
    let mut genera = Vec::new();
    for g in 1..=gbgw.genus {
        let p = jets
            .get(&g)
            .ok_or_else(|| Error::InvalidArgument(format!("missing jet polynomial for genus {g}")))?;
        let mut lhs = lhs_side(tower, g)?;
        let mut rhs = rhs_side(g, p, &data.y_jets)?;
        match fault {
            Fault::Lhs => lhs = lhs.try_add(&perturbation(lhs.ring())?)?,
            Fault::Rhs => rhs = rhs.try_add(&perturbation(rhs.ring())?)?,
            Fault::None => {}
        }
        genera.push(compare(g, &lhs, &rhs)?);
    }
    let first_mismatch = genera.iter().find_map(|r| r.first_mismatch.clone());
    Ok(VerificationReport {
        genus: gbgw.genus,
        status: if first_mismatch.is_some() {
            Status::Mismatch
        } else {
            Status::Match
        },
        truncation: Truncation {
            gbgw: gbgw.clone(),
            wk: BTreeMap::new(),
        },
        genera,
        first_mismatch,
        fault,
        wall_time_ms: start.elapsed().as_millis() as u64,
        input_cache_keys: BTreeMap::new(),
    })
}

/// Part of `lhs - rhs` with positive degree in the times, for a tower built
/// without pinning the values at `T = 0`. Zero means the two sides can only
/// differ by a function of `x`.
pub fn unpinned_time_dependence(
    unpinned: &FreeEnergyTower,
    g: u32,
    p: &JetPolynomial,
    y_jets: &[ExactSeries],
    times: &[String],
) -> Result<ExactSeries> {
    let diff = lhs_side(unpinned, g)?.try_sub(&rhs_side(g, p, y_jets)?)?;
    let ring = diff.ring().clone();
    let idx: Vec<usize> = times.iter().map(|t| ring.index_of(t)).collect::<Result<_>>()?;
    Ok(diff.filter(|m| idx.iter().any(|&i| m.get(i) > 0)))
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(int(1), |acc, k| acc * int(k))
}

/// `sigma_j = -2 (1 - 4^{-j}) (2j - 2)!`.
pub fn sigma(j: u32) -> Rational {
    let quarter = (0..j).fold(int(1), |acc, _| acc * rat(1, 4));
    int(-2) * (int(1) - quarter) * factorial(2 * j - 2)
}

/// `base^e` for any integer `e`.
fn rpow(base: &Rational, e: i32) -> Rational {
    let p = (0..e.unsigned_abs()).fold(int(1), |acc, _| acc * base);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Shifted Witten–Kontsevich times
/// `t_i(x, T) = delta_{i,0} x - (-1/2)^{i-1} - 2 sum_a (-(2a+1)/2)^i T_{2a+1} / a!`.
pub fn hodge_time(ring: &Ring, times: &[String], i: u32) -> Result<ExactSeries> {
    let mut out = ExactSeries::constant(ring, -rpow(&rat(-1, 2), i as i32 - 1));
    if i == 0 {
        let x = ExactSeries::var(ring, "X")?.try_sub(&ExactSeries::constant(ring, int(2)))?;
        out = out.try_add(&x)?;
    }
    for (a, t) in times.iter().enumerate() {
        let c = rpow(&rat(-(2 * a as i64 + 1), 2), i as i32) * int(-2) / factorial(a as u32);
        out = out.try_add(&ExactSeries::var(ring, t)?.scale(&c))?;
    }
    Ok(out)
}

/// `sum_i c_i(v) v^i / i!` until `v^i` truncates away; `v` must be nilpotent.
fn exp_like_sum(
    v: &ExactSeries,
    mut coeff: impl FnMut(u32) -> Result<ExactSeries>,
) -> Result<ExactSeries> {
    let ring = v.ring();
    let mut out = ExactSeries::zero(ring);
    let mut power = ExactSeries::one(ring);
    let mut i = 0u32;
    while !power.is_zero() {
        let term = coeff(i)?.try_mul(&power)?.scale(&factorial(i).recip());
        out = out.try_add(&term)?;
        i += 1;
        power = power.try_mul(v)?;
    }
    Ok(out)
}

/// `sum_i -(-1/2)^{i-1} v^i / i!`, which resums to `2 exp(-v/2)`.
pub fn hodge_constant_sum(v: &ExactSeries) -> Result<ExactSeries> {
    let ring = v.ring();
    exp_like_sum(v, |i| {
        Ok(ExactSeries::constant(ring, -rpow(&rat(-1, 2), i as i32 - 1)))
    })
}

/// Residual of the genus-zero string equation
/// `sum_i t_i(x, T) v^i / i! - v` at `v = -2 log Q`; it reduces to the
/// equation defining `Q`.
pub fn hodge_genus0_check(layout: &GbgwLayout) -> Result<ExactSeries> {
    let ring = layout.ring()?;
    let times = layout.time_names();
    let q = solve_q(&ring, &times)?;
    let v = q.log_unit()?.scale(&int(-2));
    let sum = exp_like_sum(&v, |i| {
        let t = hodge_time(&ring, &times, i)?;
        if i == 1 {
            t.try_add(&ExactSeries::one(&ring))
        } else {
            Ok(t)
        }
    })?;
    sum.try_sub(&v)
}

/// Residual of `F_1 - [(1/24) log u_x - u/16]`, `u = -2 log Q`.
pub fn hodge_genus1_check(tower: &FreeEnergyTower, data: &GenusZeroData) -> Result<ExactSeries> {
    let ring = tower.ring();
    let low = reduced_ring(ring, &[("X", 1)])?;
    let ux = data.u.derive("X")?;
    let rhs = ux
        .log_unit()?
        .scale(&rat(1, 24))
        .try_sub(&data.u.scale(&rat(1, 16)))?;
    tower.genus(1)?.try_sub(&rhs)?.truncated_to(&low)
}
