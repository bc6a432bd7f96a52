//! Witten–Kontsevich free energies and their jet-variable form
//! `F_g = P_g(v_1, ..., v_{3g-2})`, `v_k = d^k v / dt0^k`, `v = d^2 F_0 / dt0^2`.

mod fit;
mod jet;

pub use fit::solve_columns;
pub use jet::{JetExps, JetPolynomial};

use crate::error::{Error, Result};
use crate::kdv::{reconstruct_wk, wk_solution, FlowTable, FreeEnergyTower, WkLayout};
use crate::series::{int, ExactSeries, Rational};

#[derive(Clone, Debug)]
pub struct WkExpansion {
    pub tower: FreeEnergyTower,
    pub v: ExactSeries,
    /// `v_jets[k] = d^k v / dt0^k` for `k = 0..=3G-2`.
    pub v_jets: Vec<ExactSeries>,
}

/// `d^k v / dt0^k`, `k = 0..=kmax`. `t0` is uncapped, so these are exact.
pub fn t0_jets(v: &ExactSeries, kmax: usize) -> Result<Vec<ExactSeries>> {
    let mut out = vec![v.clone()];
    for k in 1..=kmax {
        let next = out[k - 1].derive("t0")?;
        out.push(next);
    }
    Ok(out)
}

fn jet_count(genus: u32) -> usize {
    JetPolynomial::width(genus.max(1))
}

/// Series `z^m(jets)` for every exponent vector of the ansatz.
fn ansatz_columns(genus: u32, jets: &[ExactSeries]) -> Result<(Vec<JetExps>, Vec<ExactSeries>)> {
    let support = JetPolynomial::ansatz(genus);
    let mut cols = Vec::with_capacity(support.len());
    for m in &support {
        let mut single = JetPolynomial::zero(genus);
        single.add_term(m.clone(), int(1));
        cols.push(single.evaluate(jets, None)?);
    }
    Ok((support, cols))
}

fn assemble(genus: u32, support: Vec<JetExps>, coeffs: Vec<Rational>) -> JetPolynomial {
    let mut p = JetPolynomial::zero(genus);
    for (m, c) in support.into_iter().zip(coeffs) {
        p.add_term(m, c);
    }
    p
}

/// The Witten–Kontsevich tower to genus `layout.genus`.
///
/// String and dilaton equations leave the part of `F_g` free of `t0` and
/// `t1` open for `g >= 2`. It is fixed here by the jet form: `dF_g/dt0`
/// is known from the KdV solution, the jet ansatz is fitted to it (only
/// constants in `t0` are lost, and the ansatz has none), and the fitted
/// polynomial supplies the missing monomials.
pub fn wk_tower(layout: &WkLayout, table: &FlowTable) -> Result<WkExpansion> {
    let sol = wk_solution(layout, table)?;
    let v = sol.u.slice("hbar", 0)?;
    let v_jets = t0_jets(&v, jet_count(layout.genus))?;
    let constraints = layout.constraints(sol.u.ring())?;
    let tower = reconstruct_wk(&sol, &constraints, layout.genus, |g, p| {
        let ring = p.ring();
        if g < 2 {
            return Ok(ExactSeries::zero(ring));
        }
        let (support, cols) = ansatz_columns(g, &v_jets)?;
        let derived: Vec<ExactSeries> = cols.iter().map(|c| c.derive("t0")).collect::<Result<_>>()?;
        let coeffs = solve_columns(&derived, p)?;
        let full = assemble(g, support, coeffs).evaluate(&v_jets, None)?;
        full.restrict_zero("t0")?.restrict_zero("t1")
    })?;
    Ok(WkExpansion { tower, v, v_jets })
}

/// The unique jet polynomial reproducing `F_g` (`g >= 1`) from the tower.
pub fn fit_jet_polynomial(genus: u32, wk: &WkExpansion) -> Result<JetPolynomial> {
    let target = wk.tower.genus(genus)?;
    if target.is_zero() {
        return Err(Error::InvalidArgument(format!("F_{genus} is zero")));
    }
    let p = match genus {
        0 => {
            return Err(Error::InvalidArgument(
                "genus 0 has no jet-polynomial form".into(),
            ))
        }
        1 => JetPolynomial::genus_one(),
        g => {
            let (support, cols) = ansatz_columns(g, &wk.v_jets)?;
            assemble(g, support, solve_columns(&cols, target)?)
        }
    };
    // round trip, also for the logarithmic case
    let back = p.evaluate(&wk.v_jets, None)?;
    if let Some((m, c)) = back.try_sub(target)?.first_term() {
        return Err(Error::LinearSystem(format!(
            "jet form of F_{genus} misses {}: {c}",
            back.format_monomial(m)
        )));
    }
    Ok(p)
}

/// Substitutes `z_k = jets[k]`; see [`JetPolynomial::evaluate`].
pub fn evaluate_jets(
    p: &JetPolynomial,
    jets: &[ExactSeries],
    log2_var: Option<&str>,
) -> Result<ExactSeries> {
    p.evaluate(jets, log2_var)
}

#[cfg(test)]
mod tests;
