use num_traits::Zero;

use super::constraints::{reduced_ring, require_zero, ConstraintSet};
use super::evolve::Provenance;
use crate::error::{Error, Result};
use crate::series::{ExactSeries, Monomial, Rational, Ring};

/// The genus parts `F_0, ..., F_G` of `sum_g hbar^{2g-2} F_g` (no `hbar`
/// inside), with the solution `U` they were built from.
#[derive(Clone, Debug)]
pub struct FreeEnergyTower {
    pub provenance: Provenance,
    pub u: ExactSeries,
    genera: Vec<ExactSeries>,
}

impl FreeEnergyTower {
    /// Assembles a tower from explicit genus components, unchecked.
    pub fn from_genera(provenance: Provenance, u: ExactSeries, genera: Vec<ExactSeries>) -> Self {
        FreeEnergyTower {
            provenance,
            u,
            genera,
        }
    }

    pub fn genus(&self, g: u32) -> Result<&ExactSeries> {
        self.genera
            .get(g as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("genus {g} not in tower")))
    }

    pub fn max_genus(&self) -> u32 {
        self.genera.len() as u32 - 1
    }

    pub fn genera(&self) -> &[ExactSeries] {
        &self.genera
    }

    pub fn ring(&self) -> &Ring {
        self.u.ring()
    }
}

/// What the reconstruction needs besides `U`: the spatial variable, the
/// other time variables with their densities `hbar^2 d^2F/d(spatial)dT`,
/// and the `hbar` variable. Each density need only be exact one order
/// below the ring's reach in its own time.
#[derive(Clone, Debug)]
pub struct KdvSolution {
    pub provenance: Provenance,
    pub u: ExactSeries,
    pub spatial: String,
    pub hbar: String,
    pub densities: Vec<(String, ExactSeries)>,
}

impl KdvSolution {
    fn genus_slice(&self, s: &ExactSeries, g: u32) -> Result<ExactSeries> {
        s.slice(&self.hbar, 2 * g as u16)
    }

    fn time_vars(&self) -> impl Iterator<Item = &str> {
        self.densities.iter().map(|(v, _)| v.as_str())
    }
}

/// `sum_v v * s_v` over the time variables, divided monomial-wise by the
/// total degree in those variables; recovers `f - f(0)` from the partials
/// `s_v = df/dv`.
fn euler_integrate(parts: &[(&str, ExactSeries)], ring: &Ring) -> Result<ExactSeries> {
    let idx: Vec<usize> = parts
        .iter()
        .map(|(v, _)| ring.index_of(v))
        .collect::<Result<_>>()?;
    let mut sum = ExactSeries::zero(ring);
    for (v, s) in parts {
        sum = sum.try_add(&s.try_mul(&ExactSeries::var(ring, v)?)?)?;
    }
    let mut out = ExactSeries::zero(ring);
    for (m, c) in sum.terms() {
        let deg: u32 = idx.iter().map(|&i| m.get(i) as u32).sum();
        out.add_term(m.clone(), c / Rational::from_integer(deg.into()));
    }
    Ok(out)
}

/// `P_g = dF_g/d(spatial)`: the `b = 0` density integrated once, plus its
/// value at `spatial = 0` from the other densities (non-constant part) and
/// `constant` (the value at all times zero).
fn spatial_derivative(
    sol: &KdvSolution,
    g: u32,
    constant: impl FnOnce(&[(&str, ExactSeries)]) -> Result<ExactSeries>,
) -> Result<ExactSeries> {
    let ring = sol.u.ring();
    let sp = sol.spatial.as_str();
    let ug = sol.genus_slice(&sol.u, g)?;
    let mut at_zero = Vec::new();
    for (v, d) in &sol.densities {
        at_zero.push((v.as_str(), sol.genus_slice(d, g)?.restrict_zero(sp)?));
    }
    let phi = euler_integrate(&at_zero, ring)?.try_add(&constant(&at_zero)?)?;
    ug.integrate_truncating(sp)?.try_add(&phi)
}

fn all_times_zero(s: &ExactSeries, vars: &[&str]) -> Result<ExactSeries> {
    let mut out = s.clone();
    for v in vars {
        out = out.restrict_zero(v)?;
    }
    Ok(out)
}

/// Generalized BGW reconstruction. The spatial variable carries the only
/// shift in the L0 constraint, so L0 at `spatial = 0` fixes every
/// time-dependent coefficient; the time-independent part is the boundary
/// value (or zero when `pin_boundary` is off).
pub fn reconstruct_gbgw(
    sol: &KdvSolution,
    constraints: &ConstraintSet,
    genus: u32,
    pin_boundary: bool,
) -> Result<FreeEnergyTower> {
    let ring = sol.u.ring().clone();
    let sp = sol.spatial.as_str();
    let l0 = &constraints.l0;
    let sp_term = l0
        .term(sp)
        .ok_or_else(|| Error::InvalidArgument(format!("L0 has no {sp} term")))?;
    let lambda = &sp_term.coeff * &sp_term.shift;
    if lambda.is_zero() {
        return Err(Error::InvalidArgument("L0 must shift the spatial time".into()));
    }
    let others: Vec<(usize, Rational)> = l0
        .terms
        .iter()
        .filter(|t| t.var != sp)
        .map(|t| {
            if !t.shift.is_zero() {
                return Err(Error::InvalidArgument(format!("unexpected shift in {}", t.var)));
            }
            Ok((ring.index_of(&t.var)?, t.coeff.clone()))
        })
        .collect::<Result<_>>()?;
    let times: Vec<&str> = std::iter::once(sp).chain(sol.time_vars()).collect();

    let mut genera = Vec::new();
    for g in 0..=genus {
        let inh = l0.inhomogeneous(g, &ring);
        let inh_static = all_times_zero(&inh, &times)?;
        // L0 at all times zero: -lambda P(0) + inh(0) = 0
        let p = spatial_derivative(sol, g, |_| Ok(inh_static.scale(&lambda.recip())))?;
        // L0 at spatial = 0: E psi = lambda P|_{sp=0} - inh|_{sp=0}
        let rhs = p
            .restrict_zero(sp)?
            .scale(&lambda)
            .try_sub(&inh.restrict_zero(sp)?)?;
        let mut psi = ExactSeries::zero(&ring);
        for (m, c) in rhs.terms() {
            let w: Rational = others
                .iter()
                .map(|(i, coeff)| coeff * Rational::from_integer(m.get(*i).into()))
                .sum();
            if w.is_zero() {
                return Err(Error::Residual {
                    what: "L0 at all times zero".into(),
                    genus: g,
                    monomial: rhs.format_monomial(m),
                    coefficient: c.to_string(),
                });
            }
            psi.add_term(m.clone(), c / w);
        }
        if pin_boundary {
            psi = psi.try_add(&all_times_zero(&constraints.boundary(g, &ring), &times)?)?;
        }
        genera.push(p.integrate_truncating(sp)?.try_add(&psi)?);
    }
    let tower = FreeEnergyTower {
        provenance: sol.provenance,
        u: sol.u.clone(),
        genera,
    };
    check_tower(&tower, sol, constraints, pin_boundary)?;
    Ok(tower)
}

/// Witten–Kontsevich reconstruction. The spatial time is unshifted, so the
/// time-dependence at `spatial = 0` comes from L0 (recursion in the shifted
/// time) seeded by `resonant(g)`: the part of `F_g` free of both the
/// spatial and the shifted time, which L0 and the dilaton leave open.
pub fn reconstruct_wk(
    sol: &KdvSolution,
    constraints: &ConstraintSet,
    genus: u32,
    mut resonant: impl FnMut(u32, &ExactSeries) -> Result<ExactSeries>,
) -> Result<FreeEnergyTower> {
    let ring = sol.u.ring().clone();
    let sp = sol.spatial.as_str();
    let l0 = &constraints.l0;
    let shifted: Vec<_> = l0.terms.iter().filter(|t| !t.shift.is_zero()).collect();
    let [shifted] = shifted.as_slice() else {
        return Err(Error::InvalidArgument("L0 must shift exactly one time".into()));
    };
    if shifted.var == sp {
        return Err(Error::InvalidArgument("L0 shifts the spatial time".into()));
    }
    let lambda = &shifted.coeff * &shifted.shift;
    let sp_coeff = l0.term(sp).map(|t| t.coeff.clone()).unwrap_or_else(Rational::zero);
    let si = ring.index_of(&shifted.var)?;
    let weights: Vec<(usize, Rational)> = l0
        .terms
        .iter()
        .map(|t| Ok((ring.index_of(&t.var)?, t.coeff.clone())))
        .collect::<Result<_>>()?;
    let times: Vec<&str> = std::iter::once(sp).chain(sol.time_vars()).collect();

    let mut genera = Vec::new();
    for g in 0..=genus {
        let inh = l0.inhomogeneous(g, &ring);
        // d/d(sp) of L0 at all times zero:
        //   sp_coeff P(0) - lambda dP/d(shifted)(0) + d inh/d(sp)(0) = 0
        let inh_sp = all_times_zero(&inh.derive(sp)?, &times)?;
        let p = spatial_derivative(sol, g, |at_zero| {
            let (_, d) = at_zero
                .iter()
                .find(|(v, _)| *v == shifted.var)
                .ok_or_else(|| Error::InvalidArgument(format!("no density for {}", shifted.var)))?;
            let d0 = all_times_zero(d, &times)?;
            if sp_coeff.is_zero() {
                return Err(Error::InvalidArgument("L0 has no spatial term".into()));
            }
            Ok(d0.scale(&lambda).try_sub(&inh_sp)?.scale(&sp_coeff.recip()))
        })?;
        let seeds = resonant(g, &p)?;
        let base = all_times_zero(&constraints.boundary(g, &ring), &times)?;
        let mut psi = ExactSeries::zero(&ring);
        let inh0 = inh.restrict_zero(sp)?;
        let mut starts: Vec<(Monomial, Rational)> = seeds
            .terms()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        let one = Monomial::one(ring.nvars());
        if !starts.iter().any(|(m, _)| *m == one) {
            starts.push((one.clone(), base.constant_term()));
        }
        for (m, c) in starts {
            if m.get(si) != 0 || m.get(ring.index_of(sp)?) != 0 {
                return Err(Error::InvalidArgument(
                    "resonant seeds must be free of the spatial and shifted times".into(),
                ));
            }
            // coefficient of shifted^k m in L0:
            //   w(shifted^k m) psi_k - lambda (k+1) psi_{k+1} + inh = 0
            let mut cur = m;
            let mut value = c;
            loop {
                let next = cur.with(si, cur.get(si) + 1);
                if !ring.admits(&next) {
                    psi.add_term(cur, value);
                    break;
                }
                let w: Rational = weights
                    .iter()
                    .map(|(i, coeff)| coeff * Rational::from_integer(cur.get(*i).into()))
                    .sum();
                let k1 = Rational::from_integer((cur.get(si) + 1).into());
                let next_value = (w * &value + inh0.coeff(&cur)) / (&lambda * k1);
                psi.add_term(cur, value);
                cur = next;
                value = next_value;
            }
        }
        genera.push(p.integrate_truncating(sp)?.try_add(&psi)?);
    }
    let tower = FreeEnergyTower {
        provenance: sol.provenance,
        u: sol.u.clone(),
        genera,
    };
    check_tower(&tower, sol, constraints, true)?;
    Ok(tower)
}

/// Re-asserts every defining property of the tower: the solution, the
/// densities, both constraints and (optionally) the boundary value.
pub fn check_tower(
    tower: &FreeEnergyTower,
    sol: &KdvSolution,
    constraints: &ConstraintSet,
    check_boundary: bool,
) -> Result<()> {
    let ring = sol.u.ring();
    let sp = sol.spatial.as_str();
    let times: Vec<&str> = std::iter::once(sp).chain(sol.time_vars()).collect();
    for (g, f) in tower.genera.iter().enumerate() {
        let g = g as u32;
        let low = reduced_ring(ring, &[(sp, 2)])?;
        let lhs = f.derive(sp)?.derive(sp)?;
        let diff = lhs.try_sub(&sol.genus_slice(&sol.u, g)?)?.truncated_to(&low)?;
        require_zero(&diff, "second spatial derivative", g)?;
        for (v, d) in &sol.densities {
            let low = reduced_ring(ring, &[(sp, 1), (v, 1)])?;
            let lhs = f.derive(sp)?.derive(v)?;
            let diff = lhs.try_sub(&sol.genus_slice(d, g)?)?.truncated_to(&low)?;
            require_zero(&diff, &format!("two-point density {v}"), g)?;
        }
        require_zero(&constraints.l0.residual(g, f)?, "L0", g)?;
        let mut dil = constraints.dilaton.residual(g, f)?;
        if !check_boundary {
            // without the boundary value only the time-dependent part is fixed
            let idx: Vec<usize> = times.iter().map(|t| ring.index_of(t)).collect::<Result<_>>()?;
            dil = dil.filter(|m| idx.iter().any(|&i| m.get(i) > 0));
        }
        require_zero(&dil, "dilaton", g)?;
        if check_boundary {
            let diff = all_times_zero(f, &times)?
                .try_sub(&all_times_zero(&constraints.boundary(g, ring), &times)?)?;
            require_zero(&diff, "boundary", g)?;
        }
    }
    Ok(())
}

/// `F_0 - reference` over the tower's ring; zero when both agree.
pub fn genus0_crosscheck(tower: &FreeEnergyTower, reference: &ExactSeries) -> Result<ExactSeries> {
    let r = reference.embed(tower.ring())?;
    tower.genus(0)?.try_sub(&r)
}
