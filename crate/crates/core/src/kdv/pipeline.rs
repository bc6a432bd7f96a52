//! Ring layouts and the two concrete solutions: generalized BGW and
//! Witten–Kontsevich.

use serde::{Deserialize, Serialize};

use super::boundary::boundary_value;
use super::constraints::{reduced_ring, ConstraintSet};
use super::evolve::{evolve, two_point_density, InitialData, Provenance};
use super::flows::FlowTable;
use super::pole::pole_to_power;
use super::reconstruct::{reconstruct_gbgw, FreeEnergyTower, KdvSolution};
use crate::error::{Error, Result};
use crate::series::{ExactSeries, Ring, TruncationSpec, VarSpec};

/// Truncation of the generalized BGW computation: genus cap `G`, times
/// `T1, T3, ..., T_{2A+1}`, total degree in `T`, degree in `X = x + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GbgwLayout {
    pub genus: u32,
    pub times: u32,
    pub t_order: u32,
    pub x_order: u32,
}

impl Default for GbgwLayout {
    fn default() -> Self {
        GbgwLayout {
            genus: 3,
            times: 3,
            t_order: 4,
            x_order: 6,
        }
    }
}

impl GbgwLayout {
    pub fn validate(&self) -> Result<()> {
        if self.times < 1 || self.t_order < 1 || self.x_order < 1 {
            return Err(Error::InvalidArgument(
                "times, t-order and x-order must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn time_names(&self) -> Vec<String> {
        (0..=self.times).map(|a| format!("T{}", 2 * a + 1)).collect()
    }

    pub fn hbar_cap(&self) -> u32 {
        2 * self.genus
    }

    /// `X, T1, T3, ..., hbar, log2`; `log2` stands for `log 2`.
    pub fn ring(&self) -> Result<Ring> {
        let mut vars = vec![VarSpec::new("X", 0)];
        vars.extend(self.time_names().into_iter().map(|t| VarSpec::new(t, 1)));
        vars.push(VarSpec::new("hbar", 0));
        vars.push(VarSpec::new("log2", 0));
        Ring::new(
            vars,
            TruncationSpec::new(self.t_order)
                .with_cap("X", self.x_order)
                .with_cap("hbar", self.hbar_cap())
                .with_cap("log2", 1),
        )
    }

    /// `X, hbar, s, T3, ...` with `s = 1/(1 - T1)` uncapped: `T1` is kept
    /// exactly, so derivatives in it lose nothing.
    pub fn pole_ring(&self) -> Result<Ring> {
        let mut vars = vec![
            VarSpec::new("X", 0),
            VarSpec::new("hbar", 0),
            VarSpec::new("s", 0),
        ];
        vars.extend(self.time_names().into_iter().skip(1).map(|t| VarSpec::new(t, 1)));
        Ring::new(
            vars,
            TruncationSpec::new(self.t_order)
                .with_cap("X", self.x_order)
                .with_cap("hbar", self.hbar_cap()),
        )
    }

    pub fn flow_table(&self) -> Result<FlowTable> {
        FlowTable::new(self.times, self.hbar_cap())
    }

    pub fn constraints(&self, ring: &Ring) -> Result<ConstraintSet> {
        let boundary = (0..=self.genus)
            .map(|g| boundary_value(g, ring))
            .collect::<Result<_>>()?;
        ConstraintSet::gbgw(ring, &self.time_names(), boundary)
    }
}

/// The density for `T_{2b+1}`, exact one order below the ring's reach in
/// that time: it only enters multiplied by that time or differentiated.
fn reduced_density(
    u: &ExactSeries,
    b: u32,
    var: &str,
    init: &InitialData,
    table: &FlowTable,
) -> Result<ExactSeries> {
    let low = reduced_ring(u.ring(), &[(var, 1)])?;
    two_point_density(&u.truncated_to(&low)?, b, init, table)?.truncated_to(u.ring())
}

/// The generalized BGW solution `U` and its densities, over
/// [`GbgwLayout::ring`].
pub fn gbgw_solution(layout: &GbgwLayout, table: &FlowTable) -> Result<KdvSolution> {
    layout.validate()?;
    let pole = layout.pole_ring()?;
    let ring = layout.ring()?;
    let init = InitialData::gbgw(&pole)?;
    let flows: Vec<u32> = (1..=layout.times).collect();
    let u = evolve(&init, &flows, table)?;
    let to_t = |s: &ExactSeries| pole_to_power(s, "s", "T1", &ring);
    let mut densities = Vec::new();
    for b in 1..=layout.times {
        let var = init.time_var(b);
        let d = reduced_density(&u, b, &var, &init, table)?;
        densities.push((var, to_t(&d)?));
    }
    Ok(KdvSolution {
        provenance: Provenance::Gbgw,
        u: to_t(&u)?,
        spatial: "T1".into(),
        hbar: "hbar".into(),
        densities,
    })
}

/// The generalized BGW free energy tower, boundary pinned or not.
pub fn gbgw_tower(layout: &GbgwLayout, table: &FlowTable, pin: bool) -> Result<FreeEnergyTower> {
    let sol = gbgw_solution(layout, table)?;
    let constraints = layout.constraints(sol.u.ring())?;
    reconstruct_gbgw(&sol, &constraints, layout.genus, pin)
}

/// Truncation of the Witten–Kontsevich computation: genus cap `G`, times
/// `t0, ..., tM`, and `order`, a cap on `sum_{i>=2} (i-1) m_i` (the part of
/// the dimension grading carried by `t2, t3, ...`) and on the power of `t1`.
/// `t0` is uncapped; the dimension grading bounds it genus by genus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WkLayout {
    pub genus: u32,
    pub times: u32,
    pub order: u32,
}

impl WkLayout {
    /// `M = 3G - 1` times and order `3G - 1`.
    pub fn for_genus(genus: u32) -> Self {
        let m = (3 * genus).saturating_sub(1).max(2);
        WkLayout {
            genus,
            times: m,
            order: m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.times + 1 < 3 * self.genus {
            return Err(Error::InvalidArgument(format!(
                "genus {} needs at least {} times",
                self.genus,
                3 * self.genus - 1
            )));
        }
        if self.order < 1 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        Ok(())
    }

    pub fn time_names(&self) -> Vec<String> {
        (0..=self.times).map(|i| format!("t{i}")).collect()
    }

    pub fn hbar_cap(&self) -> u32 {
        2 * self.genus
    }

    pub fn ring(&self) -> Result<Ring> {
        let mut vars = vec![VarSpec::new("t0", 0), VarSpec::new("t1", 0)];
        vars.extend((2..=self.times).map(|i| VarSpec::new(format!("t{i}"), i - 1)));
        vars.push(VarSpec::new("hbar", 0));
        Ring::new(
            vars,
            TruncationSpec::new(self.order)
                .with_cap("t1", self.order)
                .with_cap("hbar", self.hbar_cap()),
        )
    }

    pub fn flow_table(&self) -> Result<FlowTable> {
        FlowTable::new(self.times, self.hbar_cap())
    }

    pub fn constraints(&self, ring: &Ring) -> Result<ConstraintSet> {
        ConstraintSet::wk(ring, &self.time_names(), self.genus)
    }
}

pub fn wk_solution(layout: &WkLayout, table: &FlowTable) -> Result<KdvSolution> {
    layout.validate()?;
    let ring = layout.ring()?;
    let init = InitialData::wk(&ring)?;
    let flows: Vec<u32> = (1..=layout.times).collect();
    let u = evolve(&init, &flows, table)?;
    let mut densities = Vec::new();
    for b in 1..=layout.times {
        let var = init.time_var(b);
        let d = reduced_density(&u, b, &var, &init, table)?;
        densities.push((var, d));
    }
    Ok(KdvSolution {
        provenance: Provenance::Wk,
        u,
        spatial: "t0".into(),
        hbar: "hbar".into(),
        densities,
    })
}
