use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{int, log_tracking_two, rat, ExactSeries, Rational};

/// Exponents `(m_1, ..., m_K)` of `z_1^{m_1} ... z_K^{m_K}`; `m_1` may be
/// negative.
pub type JetExps = Vec<i32>;

/// A Laurent polynomial in `z_1` and polynomial in `z_2, ..., z_{3g-2}`,
/// or, at genus one, the symbol `(1/24) log z_1` (`log_coeff`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPolynomial {
    pub genus: u32,
    pub terms: BTreeMap<JetExps, Rational>,
    pub log_coeff: Option<Rational>,
}

impl JetPolynomial {
    pub fn genus_one() -> Self {
        JetPolynomial {
            genus: 1,
            terms: BTreeMap::new(),
            log_coeff: Some(rat(1, 24)),
        }
    }

    /// Number of jet variables, `3g - 2`.
    pub fn width(genus: u32) -> usize {
        (3 * genus as usize).saturating_sub(2).max(1)
    }

    /// Every exponent vector with `sum k m_k = 2g - 2` and
    /// `sum m_k = 1 - g`, `m_k >= 0` for `k >= 2`. Subtracting the two,
    /// `(m_2, ..., m_K)` runs over partitions of `3g - 3` into parts `k - 1`.
    pub fn ansatz(genus: u32) -> Vec<JetExps> {
        let width = Self::width(genus);
        let target = 3 * genus as i32 - 3;
        let mut out = Vec::new();
        let mut exps = vec![0i32; width];
        fn rec(k: usize, left: i32, exps: &mut Vec<i32>, out: &mut Vec<JetExps>, genus: i32) {
            if k == exps.len() {
                if left == 0 {
                    let rest: i32 = exps[1..].iter().sum();
                    let mut e = exps.clone();
                    e[0] = 1 - genus - rest;
                    out.push(e);
                }
                return;
            }
            // index k holds m_{k+1}, a part of size k
            let part = k as i32;
            let mut m = 0;
            while m * part <= left {
                exps[k] = m;
                rec(k + 1, left - m * part, exps, out, genus);
                m += 1;
            }
            exps[k] = 0;
        }
        if genus >= 2 {
            rec(1, target, &mut exps, &mut out, genus as i32);
        }
        out.sort();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.log_coeff.is_none()
    }

    /// Substitutes `z_k = jets[k]` (`jets[0]` is unused). Negative powers of
    /// `z_1` need an invertible constant term; the logarithm needs `1`, or a
    /// power of two when `log2_var` names a ring variable for `log 2`.
    pub fn evaluate(&self, jets: &[ExactSeries], log2_var: Option<&str>) -> Result<ExactSeries> {
        let z1 = jets
            .get(1)
            .ok_or_else(|| Error::InvalidArgument("jets must include z_1".into()))?;
        let ring = z1.ring();
        if z1.constant_term().is_zero() {
            return Err(Error::NotInvertible);
        }
        let mut out = ExactSeries::zero(ring);
        if let Some(c) = &self.log_coeff {
            let log = match log2_var {
                Some(v) if !z1.constant_term().is_one() => log_tracking_two(z1, v)?,
                _ => z1.log_unit()?,
            };
            out = out.try_add(&log.scale(c))?;
        }
        let inv = z1.invert_unit()?;
        let mut cache: BTreeMap<(usize, i32), ExactSeries> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = ExactSeries::constant(ring, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let k = i + 1;
                let base = if k == 1 && e < 0 {
                    &inv
                } else {
                    jets.get(k).ok_or(Error::JetOverflow {
                        needed: k,
                        available: jets.len() - 1,
                    })?
                };
                let p = cache
                    .entry((k, e))
                    .or_insert_with(|| base.pow(e.unsigned_abs()));
                term = term.try_mul(p)?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Residuals of the two scaling identities as formal Laurent
    /// polynomials in `z`:
    /// `sum (k+2)/2 z_k dP/dz_k - delta_{g,1}/16` and
    /// `sum k z_k dP/dz_k - (2g-2) P - delta_{g,1}/24`.
    /// Both vanish for a genuine free energy.
    pub fn check_lemma(&self) -> (JetPolynomial, JetPolynomial) {
        let g = self.genus as i64;
        let width = Self::width(self.genus);
        let mut first = JetPolynomial::zero(self.genus);
        let mut second = JetPolynomial::zero(self.genus);
        for (m, c) in &self.terms {
            let mut w1 = Rational::zero();
            let mut w2 = int(2 - 2 * g);
            for (i, &e) in m.iter().enumerate() {
                let k = i as i64 + 1;
                w1 += rat((k + 2) * e as i64, 2);
                w2 += int(k * e as i64);
            }
            first.add_term(m.clone(), w1 * c);
            second.add_term(m.clone(), w2 * c);
        }
        let delta = if g == 1 { Rational::one() } else { Rational::zero() };
        let mut c1 = -(&delta * rat(1, 16));
        let mut c2 = -(&delta * rat(1, 24));
        if let Some(c) = &self.log_coeff {
            // z_1 d/dz_1 (c log z_1) = c
            c1 += c * rat(3, 2);
            c2 += c.clone();
            let left = -(c * int(2 * g - 2));
            if !left.is_zero() {
                second.log_coeff = Some(left);
            }
        }
        first.add_term(vec![0; width], c1);
        second.add_term(vec![0; width], c2);
        (first, second)
    }

    pub fn zero(genus: u32) -> Self {
        JetPolynomial {
            genus,
            terms: BTreeMap::new(),
            log_coeff: None,
        }
    }

    /// Adds `c z^m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: JetExps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// One line per term, `m1,m2,...<TAB>num/den`, exponent vectors
    /// ascending; the logarithm is the line `log<TAB>num/den`.
    pub fn to_canonical_text(&self) -> String {
        let mut out = format!("# genus {}\n", self.genus);
        if let Some(c) = &self.log_coeff {
            let _ = writeln!(out, "log\t{}/{}", c.numer(), c.denom());
        }
        for (m, c) in &self.terms {
            let exps: Vec<String> = m.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{}\t{}/{}", exps.join(","), c.numer(), c.denom());
        }
        out
    }

    pub fn from_canonical_text(text: &str) -> Result<Self> {
        let mut genus = None;
        let mut terms = BTreeMap::new();
        let mut log_coeff = None;
        for (n, line) in text.lines().enumerate() {
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", n + 1));
            if let Some(rest) = line.strip_prefix("# genus ") {
                genus = Some(rest.trim().parse::<u32>().map_err(|_| bad("bad genus"))?);
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, coeff) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let c: Rational = coeff.parse().map_err(|_| bad("bad coefficient"))?;
            if lhs == "log" {
                log_coeff = Some(c);
            } else {
                let m: JetExps = lhs
                    .split(',')
                    .map(|e| e.parse::<i32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad exponent"))?;
                terms.insert(m, c);
            }
        }
        Ok(JetPolynomial {
            genus: genus.ok_or_else(|| Error::Parse("missing genus header".into()))?,
            terms,
            log_coeff,
        })
    }
}
