use crate::error::{Error, Result};
use crate::series::{format_monomial, int, rat, ExactSeries, Rational, Ring};

/// `coeff * (var - shift) * d/dvar`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTerm {
    pub var: String,
    pub coeff: Rational,
    pub shift: Rational,
}

impl EulerTerm {
    pub fn new(var: impl Into<String>, coeff: Rational, shift: Rational) -> Self {
        EulerTerm {
            var: var.into(),
            coeff,
            shift,
        }
    }
}

/// `sum_terms + (a g + b) F_g + inhomogeneous_g = 0` for every genus `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<EulerTerm>,
    pub genus_coeff: (Rational, Rational),
    pub inhomogeneous: Vec<ExactSeries>,
}

impl LinearConstraint {
    pub fn term(&self, var: &str) -> Option<&EulerTerm> {
        self.terms.iter().find(|t| t.var == var)
    }

    pub fn inhomogeneous(&self, g: u32, ring: &Ring) -> ExactSeries {
        self.inhomogeneous
            .get(g as usize)
            .cloned()
            .unwrap_or_else(|| ExactSeries::zero(ring))
    }

    /// The constraint applied to `f`, over the ring in which every term is
    /// still exact (shifted derivatives lose one order).
    pub fn residual(&self, g: u32, f: &ExactSeries) -> Result<ExactSeries> {
        let ring = f.ring();
        let mut out = f.scale(&(&self.genus_coeff.0 * int(g as i64) + &self.genus_coeff.1));
        out = out.try_add(&self.inhomogeneous(g, ring))?;
        let mut lost = Vec::new();
        for t in &self.terms {
            let d = f.derive(&t.var)?;
            let v = ExactSeries::var(ring, &t.var)?
                .try_sub(&ExactSeries::constant(ring, t.shift.clone()))?;
            out = out.try_add(&v.try_mul(&d)?.scale(&t.coeff))?;
            if t.shift != int(0) {
                lost.push((t.var.as_str(), 1));
            }
        }
        out.truncated_to(&reduced_ring(ring, &lost)?)
    }
}

/// The constraints fixing the free energy tower beyond the KdV solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSet {
    pub l0: LinearConstraint,
    pub dilaton: LinearConstraint,
    /// `F_g` at all times zero, per genus.
    pub boundary: Vec<ExactSeries>,
}

impl ConstraintSet {
    /// Generalized BGW over a ring with `X` (`x = X - 2`), `T1, T3, ...`.
    /// `boundary` holds `B_g(x)` for each genus.
    pub fn gbgw(ring: &Ring, times: &[String], boundary: Vec<ExactSeries>) -> Result<Self> {
        let x = ExactSeries::var(ring, "X")?.try_sub(&ExactSeries::constant(ring, int(2)))?;
        let mut l0 = Vec::new();
        let mut dil = vec![EulerTerm::new("X", int(1), int(2))];
        for (a, t) in times.iter().enumerate() {
            let shift = if a == 0 { int(1) } else { int(0) };
            l0.push(EulerTerm::new(t, rat(2 * a as i64 + 1, 2), shift.clone()));
            dil.push(EulerTerm::new(t, int(1), shift));
        }
        Ok(ConstraintSet {
            l0: LinearConstraint {
                name: "L0".into(),
                terms: l0,
                genus_coeff: (int(0), int(0)),
                inhomogeneous: vec![
                    x.pow(2).scale(&rat(1, 8)),
                    ExactSeries::constant(ring, rat(1, 16)),
                ],
            },
            dilaton: LinearConstraint {
                name: "dilaton".into(),
                terms: dil,
                genus_coeff: (int(2), int(-2)),
                inhomogeneous: vec![
                    ExactSeries::zero(ring),
                    ExactSeries::constant(ring, rat(1, 24)),
                ],
            },
            boundary,
        })
    }

    /// Witten–Kontsevich over a ring with `t0, t1, ...`; zero boundary.
    pub fn wk(ring: &Ring, times: &[String], genus: u32) -> Result<Self> {
        let mut l0 = Vec::new();
        let mut dil = Vec::new();
        for (i, t) in times.iter().enumerate() {
            let shift = if i == 1 { int(1) } else { int(0) };
            l0.push(EulerTerm::new(t, rat(2 * i as i64 + 1, 2), shift.clone()));
            dil.push(EulerTerm::new(t, int(1), shift));
        }
        Ok(ConstraintSet {
            l0: LinearConstraint {
                name: "L0".into(),
                terms: l0,
                genus_coeff: (int(0), int(0)),
                inhomogeneous: vec![
                    ExactSeries::zero(ring),
                    ExactSeries::constant(ring, rat(1, 16)),
                ],
            },
            dilaton: LinearConstraint {
                name: "dilaton".into(),
                terms: dil,
                genus_coeff: (int(2), int(-2)),
                inhomogeneous: vec![
                    ExactSeries::zero(ring),
                    ExactSeries::constant(ring, rat(1, 24)),
                ],
            },
            boundary: (0..=genus).map(|_| ExactSeries::zero(ring)).collect(),
        })
    }

    pub fn boundary(&self, g: u32, ring: &Ring) -> ExactSeries {
        self.boundary
            .get(g as usize)
            .cloned()
            .unwrap_or_else(|| ExactSeries::zero(ring))
    }
}

/// `ring` with each listed variable's reach lowered by the given order,
/// both in its own cap and in the weighted total.
pub fn reduced_ring(ring: &Ring, lost: &[(&str, u32)]) -> Result<Ring> {
    let mut trunc = ring.truncation().clone();
    for &(var, k) in lost {
        let i = ring.index_of(var)?;
        if let Some(c) = trunc.caps.get_mut(var) {
            *c = c.saturating_sub(k);
        }
        trunc.total = trunc.total.saturating_sub(k * ring.weight(i));
    }
    ring.with_truncation(trunc)
}

/// Fails with the first nonzero term of `residual`.
pub fn require_zero(residual: &ExactSeries, what: &str, genus: u32) -> Result<()> {
    match residual.first_term() {
        None => Ok(()),
        Some((m, c)) => Err(Error::Residual {
            what: what.to_string(),
            genus,
            monomial: format_monomial(residual.ring(), m),
            coefficient: c.to_string(),
        }),
    }
}
