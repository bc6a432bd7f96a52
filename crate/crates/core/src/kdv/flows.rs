use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::psdo::{
    assert_even_hbar, density_from_power, flow_from_powers, odd_power, Derivation, LaxConfig,
    PseudoDiffOp,
};
use crate::series::{ExactSeries, Monomial, Ring, TruncationSpec, VarSpec};

const JET_PREFIX: &str = "u";
const JET_HBAR: &str = "hbar";

/// Flow right-hand sides `K_i` and two-point densities `R_b` as differential
/// polynomials in `u, u', u'', ...` and `hbar`, computed once with operators
/// and then evaluated on concrete solutions.
#[derive(Clone, Debug)]
pub struct FlowTable {
    ring: Ring,
    hbar_cap: u32,
    flows: Vec<ExactSeries>,
    densities: Vec<ExactSeries>,
}

impl FlowTable {
    /// Flows and densities `0..=max_flow`, exact through `hbar^hbar_cap`.
    pub fn new(max_flow: u32, hbar_cap: u32) -> Result<Self> {
        // one spare hbar power: the bracket carries an extra factor of hbar
        let work_cap = hbar_cap + 1;
        // every derivative comes with one power of hbar
        let count = work_cap as usize + 3;
        let mut vars = vec![VarSpec::new(JET_HBAR, 0)];
        vars.extend((0..count).map(|k| VarSpec::new(format!("{JET_PREFIX}{k}"), 0)));
        let ring = Ring::new(vars, TruncationSpec::new(0).with_cap(JET_HBAR, work_cap))?;
        let config = LaxConfig::for_flows(
            Derivation::Jet {
                prefix: JET_PREFIX.into(),
                count,
            },
            JET_HBAR,
            max_flow,
        );
        let u = ExactSeries::var(&ring, &format!("{JET_PREFIX}0"))?;
        let l = PseudoDiffOp::lax(&u, &config);
        let h = ring.index_of(JET_HBAR)?;
        let keep = |m: &Monomial| m.get(h) as u32 <= hbar_cap;
        let mut flows = Vec::new();
        let mut densities = Vec::new();
        for i in 0..=max_flow {
            let power = odd_power(&l, i)?;
            flows.push(flow_from_powers(&power, &l, i)?.filter(keep));
            let density = density_from_power(&power, i)?.filter(keep);
            assert_even_hbar(&density, JET_HBAR, &format!("density {i}"))?;
            densities.push(density);
        }
        Ok(FlowTable {
            ring,
            hbar_cap,
            flows,
            densities,
        })
    }

    pub fn max_flow(&self) -> u32 {
        self.flows.len() as u32 - 1
    }

    pub fn hbar_cap(&self) -> u32 {
        self.hbar_cap
    }

    pub fn jet_ring(&self) -> &Ring {
        &self.ring
    }

    /// `K_i` with `du/dT_{2i+1} = K_i(u)`.
    pub fn flow(&self, i: u32) -> Result<&ExactSeries> {
        self.flows
            .get(i as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("flow {i} not in table")))
    }

    /// `R_b` with `hbar^2 d^2 F / dx dT_{2b+1} = R_b(u)`.
    pub fn density(&self, b: u32) -> Result<&ExactSeries> {
        self.densities
            .get(b as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("density {b} not in table")))
    }

    /// Substitutes `u_k -> D^k u` and `hbar -> hbar` into a differential
    /// polynomial from this table.
    pub fn evaluate(
        &self,
        poly: &ExactSeries,
        u: &ExactSeries,
        derivation: &Derivation,
        hbar: &str,
    ) -> Result<ExactSeries> {
        let target = u.ring();
        let h = self.ring.index_of(JET_HBAR)?;
        // group by the u-part; the hbar part becomes a polynomial over `target`
        let mut groups: BTreeMap<Monomial, ExactSeries> = BTreeMap::new();
        let mut top_jet = 0;
        for (m, c) in poly.terms() {
            let key = m.with(h, 0);
            for (k, &e) in key.exps().iter().enumerate() {
                if e > 0 && k != h {
                    top_jet = top_jet.max(k - 1);
                }
            }
            let coeff = ExactSeries::term(target, &[(hbar, m.get(h))], c.clone())?;
            let slot = groups
                .entry(key)
                .or_insert_with(|| ExactSeries::zero(target));
            *slot = slot.try_add(&coeff)?;
        }
        let jets = derivation.jets(u, top_jet)?;
        let mut powers: HashMap<(usize, u16), ExactSeries> = HashMap::new();
        let mut out = ExactSeries::zero(target);
        for (key, coeff) in groups {
            let mut term = coeff;
            for (k, &e) in key.exps().iter().enumerate() {
                if e == 0 || k == h {
                    continue;
                }
                let j = k - 1;
                let p = powers
                    .entry((j, e))
                    .or_insert_with(|| jets[j].pow(e as u32));
                term = term.try_mul(p)?;
                if term.is_zero() {
                    break;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }
}
