use std::fmt;

use serde::{Deserialize, Serialize};

use super::constraints::reduced_ring;
use super::flows::FlowTable;
use crate::error::{Error, Result};
use crate::psdo::Derivation;
use crate::series::{rat, ExactSeries, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Gbgw,
    Wk,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Gbgw => "gbgw",
            Provenance::Wk => "wk",
        })
    }
}

/// Initial data `U(spatial, other times = 0)` together with how the spatial
/// derivative acts on its ring and how flow indices map to variables.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub u0: ExactSeries,
    pub provenance: Provenance,
    pub spatial: Derivation,
    pub hbar: String,
}

impl InitialData {
    /// Generalized BGW data over a ring with variables `X` (`x = X - 2`),
    /// `hbar` and the pole variable `s = 1/(1 - T1)`:
    /// `U0 = s^2 (hbar^2/8 + x^2/4)`.
    pub fn gbgw(ring: &Ring) -> Result<Self> {
        let x = ExactSeries::var(ring, "X")? - ExactSeries::constant(ring, rat(2, 1));
        let h = ExactSeries::var(ring, "hbar")?;
        let s = ExactSeries::var(ring, "s")?;
        let inner = h.pow(2).scale(&rat(1, 8)) + x.pow(2).scale(&rat(1, 4));
        Ok(InitialData {
            u0: s.pow(2) * inner,
            provenance: Provenance::Gbgw,
            spatial: Derivation::Pole("s".into()),
            hbar: "hbar".into(),
        })
    }

    /// Witten–Kontsevich data `U0 = t0` over a ring with `t0` and `hbar`.
    pub fn wk(ring: &Ring) -> Result<Self> {
        Ok(InitialData {
            u0: ExactSeries::var(ring, "t0")?,
            provenance: Provenance::Wk,
            spatial: Derivation::Partial("t0".into()),
            hbar: "hbar".into(),
        })
    }

    pub fn ring(&self) -> &Ring {
        self.u0.ring()
    }

    /// Variable carrying the flow `i >= 1`.
    pub fn time_var(&self, i: u32) -> String {
        match self.provenance {
            Provenance::Gbgw => format!("T{}", 2 * i + 1),
            Provenance::Wk => format!("t{i}"),
        }
    }
}

/// Adjoins the flows `i` (each `>= 1`) in the given order by Picard
/// iteration `U <- U|_{T=0} + int_0^T K_i(U) dT`.
pub fn evolve(init: &InitialData, flows: &[u32], table: &FlowTable) -> Result<ExactSeries> {
    let mut u = init.u0.clone();
    for &i in flows {
        if i == 0 {
            return Err(Error::InvalidArgument(
                "flow 0 is the spatial direction".into(),
            ));
        }
        let var = init.time_var(i);
        if !init.ring().has_var(&var) {
            continue;
        }
        u = adjoin_flow(&u, &var, table.flow(i)?, table, init)?;
    }
    Ok(u)
}

fn adjoin_flow(
    u: &ExactSeries,
    var: &str,
    rhs: &ExactSeries,
    table: &FlowTable,
    init: &InitialData,
) -> Result<ExactSeries> {
    let ring = u.ring();
    let idx = ring.index_of(var)?;
    let weight = ring.weight(idx);
    let reach = match ring.cap(idx) {
        Some(c) => c,
        None if weight > 0 => ring.total_cap() / weight,
        None => {
            return Err(Error::InvalidArgument(format!(
                "time {var} is neither capped nor weighted"
            )))
        }
    };
    // each pass fixes one more power of `var`
    let limit = reach as usize + 2;
    let start = u.restrict_zero(var)?;
    // the integral raises the order in `var`, so the right-hand side is
    // only needed one step lower
    let low = reduced_ring(ring, &[(var, 1)])?;
    let mut current = u.clone();
    for _ in 0..limit {
        let k = table.evaluate(rhs, &current.truncated_to(&low)?, &init.spatial, &init.hbar)?;
        let next = start.try_add(&k.truncated_to(ring)?.integrate_truncating(var)?)?;
        if next == current {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::NoConvergence(limit))
}

/// `hbar^2 d^2 F / d(spatial) dT_{2b+1}`, the `D^{-1}` residue of
/// `L^{(2b+1)/2}` over `(2b+1)!!`. Equals `U` at `b = 0`.
pub fn two_point_density(
    u: &ExactSeries,
    b: u32,
    init: &InitialData,
    table: &FlowTable,
) -> Result<ExactSeries> {
    table.evaluate(table.density(b)?, u, &init.spatial, &init.hbar)
}
