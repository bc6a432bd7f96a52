use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use kdv_tau::bgw::genus_zero;
use kdv_tau::kdv::{gbgw_solution, gbgw_tower, wk_solution, Provenance, WkLayout};
use kdv_tau::series::{to_csv, ExactSeries};
use kdv_tau::verify::{verify_tower, Fault, Status, VerificationReport};
use kdv_tau::wk::{fit_jet_polynomial, wk_tower, JetPolynomial};
use serde::Serialize;

use crate::cache::Cache;
use crate::config::RunConfig;
use crate::{Failure, Format};

/// Writes to `out`, or to stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn jets_kind(g: u32) -> String {
    format!("wk-jets-g{g}")
}

pub struct JetSet {
    pub polys: BTreeMap<u32, JetPolynomial>,
    /// Cache key per entry kind.
    pub keys: BTreeMap<String, String>,
    pub all_hit: bool,
}

/// Fitted jet polynomials for the given genera, from the cache where
/// possible; a single tower over `layout` serves every missing genus.
pub fn jet_polynomials(
    layout: &WkLayout,
    genera: std::ops::RangeInclusive<u32>,
    cache: &Cache,
) -> Result<JetSet, Failure> {
    let mut found = BTreeMap::new();
    let mut keys = BTreeMap::new();
    let mut missing = Vec::new();
    for g in genera {
        let key = Cache::key(&jets_kind(g), &(g, layout));
        keys.insert(jets_kind(g), key.clone());
        match cache.load(&jets_kind(g), &key) {
            Some(text) => {
                let p = JetPolynomial::from_canonical_text(&text)?;
                found.insert(g, p);
            }
            None => missing.push((g, key)),
        }
    }
    let all_hit = missing.is_empty();
    if !missing.is_empty() {
        let wk = wk_tower(layout, &layout.flow_table()?)?;
        for (g, key) in missing {
            let p = fit_jet_polynomial(g, &wk)?;
            cache
                .store(&jets_kind(g), &key, &p.to_canonical_text())
                .map_err(|e| Failure::Internal(format!("cache write failed: {e}")))?;
            found.insert(g, p);
        }
    }
    Ok(JetSet {
        polys: found,
        keys,
        all_hit,
    })
}

pub fn verify(cfg: &RunConfig, fault: Fault, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let start = Instant::now();
    let cache = Cache::new(cfg.cache_dir.clone());
    let wk = cfg.wk();
    let JetSet { polys: jets, keys, .. } = jet_polynomials(&wk, 1..=cfg.genus, &cache)?;
    let layout = cfg.gbgw();
    let tower = gbgw_tower(&layout, &layout.flow_table()?, true)?;
    let data = genus_zero(&layout)?;
    let mut report = verify_tower(&layout, &tower, &data, &jets, fault, start)?;
    report.truncation.wk.insert(cfg.genus, wk);
    report.input_cache_keys = keys
        .into_iter()
        .map(|(k, v)| (k, format!("{}:{v}", kdv_tau::VERSION)))
        .collect();
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    emit(out, &render_report(&report, format))?;
    match &report.first_mismatch {
        None => Ok(()),
        Some(m) => Err(Failure::Mismatch(format!(
            "genus {}: first mismatch at {} (lhs {}, rhs {})",
            m.genus, m.monomial, m.lhs, m.rhs
        ))),
    }
}

fn render_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("genus,status,monomial,lhs,rhs\n");
            for r in &report.genera {
                let status = match r.status {
                    Status::Match => "match",
                    Status::Mismatch => "mismatch",
                };
                let (m, l, rr) = r
                    .first_mismatch
                    .as_ref()
                    .map(|m| (m.monomial.as_str(), m.lhs.as_str(), m.rhs.as_str()))
                    .unwrap_or(("", "", ""));
                s.push_str(&format!("{},{status},{m},{l},{rr}\n", r.genus));
            }
            s
        }
    }
}

#[derive(Serialize)]
struct JetSummary {
    genus: u32,
    terms: usize,
    logarithmic: bool,
    lemma_residuals_zero: [bool; 2],
    cache_key: String,
    cache_hit: bool,
    engine_version: &'static str,
}

/// Jet polynomial of genus `cfg.genus`; the Witten–Kontsevich layout is the
/// configured one.
pub fn wk_jets(cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let g = cfg.genus;
    let cache = Cache::new(cfg.cache_dir.clone());
    let JetSet {
        polys: jets,
        keys,
        all_hit: hit,
    } = jet_polynomials(&cfg.wk(), g..=g, &cache)?;
    let p = &jets[&g];
    let (a, b) = p.check_lemma();
    let summary = JetSummary {
        genus: g,
        terms: p.terms.len() + usize::from(p.log_coeff.is_some()),
        logarithmic: p.log_coeff.is_some(),
        lemma_residuals_zero: [a.is_zero(), b.is_zero()],
        cache_key: keys[&jets_kind(g)].clone(),
        cache_hit: hit,
        engine_version: kdv_tau::VERSION,
    };
    let summary = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match out {
        Some(path) => {
            emit(Some(path), &p.to_canonical_text())?;
            println!("{summary}");
        }
        None => {
            print!("{}", p.to_canonical_text());
            eprintln!("{summary}");
        }
    }
    if !(a.is_zero() && b.is_zero()) {
        return Err(Failure::Internal(format!(
            "genus {g} jet polynomial violates the scaling identities"
        )));
    }
    Ok(())
}

pub const SERIES_NAMES: &str = "Q, y, u, F0-closed (gbgw only), v (wk only), U, F<g> (g <= genus)";

#[derive(Serialize)]
struct SeriesDoc<'a> {
    name: &'a str,
    provenance: Provenance,
    ring: String,
    engine_version: &'static str,
    terms: Vec<(String, String)>,
}

fn series_value(cfg: &RunConfig, which: &str, provenance: Provenance) -> Result<ExactSeries, Failure> {
    let unknown = || Failure::Usage(format!("unknown series `{which}`; valid names: {SERIES_NAMES}"));
    let tower_genus = which
        .strip_prefix('F')
        .filter(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
        .map(|rest| rest.parse::<u32>().map_err(|_| unknown()))
        .transpose()?;
    if let Some(g) = tower_genus {
        if g > cfg.genus {
            return Err(Failure::Usage(format!("F{g} needs --genus {g} or more")));
        }
    }
    match provenance {
        Provenance::Gbgw => {
            let layout = cfg.gbgw();
            if let Some(g) = tower_genus {
                let tower = gbgw_tower(&layout, &layout.flow_table()?, true)?;
                return Ok(tower.genus(g)?.clone());
            }
            match which {
                "Q" | "y" | "u" | "F0-closed" => {
                    let data = genus_zero(&layout)?;
                    Ok(match which {
                        "Q" => data.q,
                        "y" => data.y,
                        "u" => data.u,
                        _ => data.f0,
                    })
                }
                "U" => Ok(gbgw_solution(&layout, &layout.flow_table()?)?.u),
                _ => Err(unknown()),
            }
        }
        Provenance::Wk => {
            let layout = cfg.wk();
            if let Some(g) = tower_genus {
                let wk = wk_tower(&layout, &layout.flow_table()?)?;
                return Ok(wk.tower.genus(g)?.clone());
            }
            match which {
                "U" => Ok(wk_solution(&layout, &layout.flow_table()?)?.u),
                "v" => Ok(wk_solution(&layout, &layout.flow_table()?)?.u.slice("hbar", 0)?),
                _ => Err(unknown()),
            }
        }
    }
}

pub fn series(
    cfg: &RunConfig,
    which: &str,
    provenance: Provenance,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let s = series_value(cfg, which, provenance)?;
    let text = match format {
        Format::Csv => to_csv(&s),
        Format::Json => {
            let doc = SeriesDoc {
                name: which,
                provenance,
                ring: s.ring().describe(),
                engine_version: kdv_tau::VERSION,
                terms: s
                    .terms()
                    .map(|(m, c)| (s.format_monomial(m), c.to_string()))
                    .collect(),
            };
            let mut t = serde_json::to_string_pretty(&doc).expect("series serializes");
            t.push('\n');
            t
        }
    };
    emit(out, &text)
}
