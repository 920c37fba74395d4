//! Exhaustive and seeded random drivers over the coefficient space.
//!
//! A tuple (A,B,C,D,E) is addressed by its index ((((A N + B) N + C) N + D) N + E) with
//! N = q^2. Shards own contiguous index ranges (exhaustive) or contiguous sample-number
//! ranges (random), and their hit lists are concatenated and sorted by index, so every
//! result is independent of the shard count.
//!
//! Random generator. Sample number i of a run with seed s owns its own stream:
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          z =  z ^ (z >> 31)
//! state_0 = mix(s) ^ mix(i + 0x9E3779B97F4A7C15)
//! next:    state += 0x9E3779B97F4A7C15; return mix(state)
//! ```
//!
//! (all arithmetic wrapping mod 2^64). `mix` is a bijection of 64-bit words. A draw in
//! [0, U) rejects words below 2^64 mod U and returns the rest mod U, so draws are uniform.
//! Filtered-out draws are rejected and redrawn from the same stream.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diffanalysis::{table_is_permutation, ApnTester};
use crate::error::{Error, GateError, Result};
use crate::field::{Field, FieldSpec};
use crate::hexanomial::{to_univariate, Coeffs, Evaluator};
use crate::invariants::{fingerprint_table, FingerprintOpts};
use crate::{sympoly, theory};

/// Largest universe (q^2)^5 searched exhaustively: q <= 8.
pub const EXHAUSTIVE_GATE: u64 = 1 << 30;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The per-sample stream described in the module documentation.
#[derive(Clone, Debug)]
pub struct SampleStream {
    state: u64,
}

impl SampleStream {
    pub fn new(seed: u64, sample: u64) -> SampleStream {
        SampleStream {
            state: mix(seed) ^ mix(sample.wrapping_add(GOLDEN)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, bound), bound > 0.
    pub fn below(&mut self, bound: u64) -> u64 {
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filters {
    pub require_a_nonzero: bool,
    pub exclude_c1_c2: bool,
    /// Keep only tuples matching at least one of these summary cases.
    pub cases: Option<BTreeSet<u8>>,
    /// Skip tuples whose verdict is `ExcludedByTheory`.
    pub prioritized: bool,
}

impl Filters {
    pub fn none() -> Filters {
        Filters::default()
    }

    /// A != 0 and neither (C1) nor (C2).
    pub fn standard() -> Filters {
        Filters {
            require_a_nonzero: true,
            exclude_c1_c2: true,
            ..Filters::default()
        }
    }

    pub fn is_none(&self) -> bool {
        *self == Filters::none()
    }

    pub fn accepts(&self, field: &Field, c: &Coeffs) -> bool {
        if self.require_a_nonzero && c.a.is_zero() {
            return false;
        }
        if self.exclude_c1_c2 {
            let (c1, c2) = theory::cond_c1_c2(field, c);
            if c1 || c2 {
                return false;
            }
        }
        if let Some(set) = &self.cases {
            if !theory::match_summary_cases(field, c)
                .matched
                .iter()
                .any(|i| set.contains(i))
            {
                return false;
            }
        }
        if self.prioritized && theory::predict_verdict(field, c).is_excluded() {
            return false;
        }
        true
    }
}

impl fmt::Display for Filters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.require_a_nonzero {
            parts.push("a-nonzero".to_string());
        }
        if self.exclude_c1_c2 {
            parts.push("no-c1c2".to_string());
        }
        if let Some(set) = &self.cases {
            let ids: Vec<String> = set.iter().map(u8::to_string).collect();
            parts.push(format!("cases={}", ids.join(";")));
        }
        if self.prioritized {
            parts.push("prioritized".to_string());
        }
        if parts.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Filters {
    type Err = Error;

    /// Comma-separated: `none`, `standard`, `a-nonzero`, `no-c1c2`, `cases=1;9`, `prioritized`.
    fn from_str(s: &str) -> Result<Filters> {
        let mut f = Filters::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "none" => {}
                "standard" => {
                    f.require_a_nonzero = true;
                    f.exclude_c1_c2 = true;
                }
                "a-nonzero" => f.require_a_nonzero = true,
                "no-c1c2" => f.exclude_c1_c2 = true,
                "prioritized" => f.prioritized = true,
                _ => {
                    let Some(list) = part.strip_prefix("cases=") else {
                        return Err(Error::Invalid(format!("unknown filter `{part}`")));
                    };
                    let mut set = BTreeSet::new();
                    for id in list.split([';', ' ']).filter(|x| !x.is_empty()) {
                        match id.parse::<u8>() {
                            Ok(i) if (1..=11).contains(&i) => {
                                set.insert(i);
                            }
                            _ => {
                                return Err(Error::Invalid(format!(
                                    "bad case id `{id}` (expected 1..=11)"
                                )))
                            }
                        }
                    }
                    f.cases = Some(set);
                }
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SearchJob {
    pub field: FieldSpec,
    pub mode: SearchMode,
    pub filters: Filters,
    pub shards: usize,
    /// Exhaustive only: also count APN tuples over the whole, unfiltered universe.
    pub dual_census: bool,
    pub force_gate: bool,
}

impl SearchJob {
    pub fn exhaustive(field: FieldSpec, filters: Filters) -> SearchJob {
        SearchJob {
            field,
            mode: SearchMode::Exhaustive,
            filters,
            shards: 1,
            dual_census: false,
            force_gate: false,
        }
    }

    pub fn random(field: FieldSpec, samples: u64, seed: u64, filters: Filters) -> SearchJob {
        SearchJob {
            field,
            mode: SearchMode::Random { samples, seed },
            filters,
            shards: 1,
            dual_census: false,
            force_gate: false,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> SearchJob {
        self.shards = shards.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub tested: u64,
    pub skipped_by_filter: u64,
    pub apn: u64,
    pub permutations: u64,
}

impl Counters {
    fn merge(&mut self, o: &Counters) {
        self.tested += o.tested;
        self.skipped_by_filter += o.skipped_by_filter;
        self.apn += o.apn;
        self.permutations += o.permutations;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub field: String,
    pub mode: SearchMode,
    pub filters: String,
    pub shards: usize,
    pub universe_size: u64,
    pub counters: Counters,
    /// APN tuples that are also permutations.
    pub apn_permutations: u64,
    /// Distinct APN tuples (random mode may draw a tuple twice).
    pub distinct_hits: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unfiltered: Option<Counters>,
    pub wall_time_secs: f64,
    pub tool_version: String,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Sorted by tuple index, without repeats.
    pub apn_hits: Vec<Coeffs>,
    pub counters: Counters,
    pub manifest: Manifest,
}

#[derive(Default)]
struct ShardOut {
    hits: Vec<(u64, Coeffs)>,
    counters: Counters,
    apn_permutations: u64,
    unfiltered: Counters,
}

fn split_ranges(total: u64, shards: usize) -> Vec<(u64, u64)> {
    let s = shards as u64;
    (0..s)
        .map(|i| (total * i / s, total * (i + 1) / s))
        .collect()
}

fn run_shards<F>(shards: usize, total: u64, work: F) -> Vec<ShardOut>
where
    F: Fn(u64, u64) -> ShardOut + Sync,
{
    let ranges = split_ranges(total, shards);
    if ranges.len() == 1 {
        return vec![work(ranges[0].0, ranges[0].1)];
    }
    std::thread::scope(|sc| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| {
                let work = &work;
                sc.spawn(move || work(lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search shard panicked"))
            .collect()
    })
}

/// APN and permutation test of one tuple with reusable scratch.
struct Probe<'f> {
    eval: Evaluator<'f>,
    tester: ApnTester,
    table: Vec<u32>,
}

impl<'f> Probe<'f> {
    fn new(field: &'f Field) -> Probe<'f> {
        Probe {
            eval: Evaluator::new(field),
            tester: ApnTester::new(field.len()),
            table: Vec::new(),
        }
    }

    fn is_apn(&mut self, c: &Coeffs) -> bool {
        self.eval.table_into(c, &mut self.table);
        self.tester.is_apn(&self.table)
    }

    fn last_is_permutation(&self) -> bool {
        table_is_permutation(&self.table)
    }
}

pub fn universe_size(field: &Field) -> u64 {
    field.size().pow(5)
}

pub fn run(job: &SearchJob) -> Result<SearchResult> {
    match job.mode {
        SearchMode::Exhaustive => run_exhaustive(job),
        SearchMode::Random { .. } => run_random(job),
    }
}

pub fn run_exhaustive(job: &SearchJob) -> Result<SearchResult> {
    let field = Field::new(job.field)?;
    let total = universe_size(&field);
    if total > EXHAUSTIVE_GATE && !job.force_gate {
        return Err(GateError {
            what: "exhaustive search",
            estimate: format!("{total} tuples (q = {})", field.q()),
            limit: format!("{EXHAUSTIVE_GATE} tuples"),
        }
        .into());
    }
    let start = Instant::now();
    let outs = run_shards(job.shards.max(1), total, |lo, hi| {
        let mut probe = Probe::new(&field);
        let mut out = ShardOut::default();
        for idx in lo..hi {
            let c = Coeffs::from_index(&field, idx);
            let keep = job.filters.accepts(&field, &c);
            if !keep && !job.dual_census {
                out.counters.skipped_by_filter += 1;
                continue;
            }
            let apn = probe.is_apn(&c);
            let perm = probe.last_is_permutation();
            if job.dual_census {
                out.unfiltered.tested += 1;
                out.unfiltered.apn += apn as u64;
                out.unfiltered.permutations += perm as u64;
            }
            if !keep {
                out.counters.skipped_by_filter += 1;
                continue;
            }
            out.counters.tested += 1;
            out.counters.permutations += perm as u64;
            if apn {
                out.counters.apn += 1;
                out.apn_permutations += perm as u64;
                out.hits.push((idx, c));
            }
        }
        out
    });
    Ok(finish(job, &field, total, outs, start))
}

pub fn run_random(job: &SearchJob) -> Result<SearchResult> {
    let SearchMode::Random { samples, seed } = job.mode else {
        return Err(Error::Invalid(
            "random search needs a sample count and a seed".into(),
        ));
    };
    let field = Field::new(job.field)?;
    let total = universe_size(&field);
    // A filter that rejects everything would loop forever; bound the redraws.
    const MAX_REDRAWS: u64 = 1 << 20;
    let start = Instant::now();
    let outs = run_shards(job.shards.max(1), samples, |lo, hi| {
        let mut probe = Probe::new(&field);
        let mut out = ShardOut::default();
        for i in lo..hi {
            let mut rng = SampleStream::new(seed, i);
            let mut found = None;
            for _ in 0..MAX_REDRAWS {
                let idx = rng.below(total);
                let c = Coeffs::from_index(&field, idx);
                if job.filters.accepts(&field, &c) {
                    found = Some((idx, c));
                    break;
                }
                out.counters.skipped_by_filter += 1;
            }
            let Some((idx, c)) = found else { continue };
            out.counters.tested += 1;
            let apn = probe.is_apn(&c);
            let perm = probe.last_is_permutation();
            out.counters.permutations += perm as u64;
            if apn {
                out.counters.apn += 1;
                out.apn_permutations += perm as u64;
                out.hits.push((idx, c));
            }
        }
        out
    });
    Ok(finish(job, &field, total, outs, start))
}

fn finish(
    job: &SearchJob,
    field: &Field,
    total: u64,
    outs: Vec<ShardOut>,
    start: Instant,
) -> SearchResult {
    let mut counters = Counters::default();
    let mut unfiltered = Counters::default();
    let mut apn_permutations = 0;
    let mut hits = Vec::new();
    for o in outs {
        counters.merge(&o.counters);
        unfiltered.merge(&o.unfiltered);
        apn_permutations += o.apn_permutations;
        hits.extend(o.hits);
    }
    hits.sort_by_key(|h| h.0);
    hits.dedup_by_key(|h| h.0);
    let apn_hits: Vec<Coeffs> = hits.into_iter().map(|h| h.1).collect();
    let manifest = Manifest {
        field: field.spec().to_string(),
        mode: job.mode,
        filters: job.filters.to_string(),
        shards: job.shards.max(1),
        universe_size: total,
        counters,
        apn_permutations,
        distinct_hits: apn_hits.len() as u64,
        unfiltered: (job.dual_census && job.mode == SearchMode::Exhaustive).then_some(unfiltered),
        wall_time_secs: start.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    SearchResult {
        apn_hits,
        counters,
        manifest,
    }
}

/// Split of the tuples with h1 = 0 and BC^q + B^qD != 0 by gcd(a2, a0) and APN-ness.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCensus {
    pub field: String,
    pub filters: String,
    pub regime_total: u64,
    pub gcd_trivial_apn: u64,
    pub gcd_trivial_not_apn: u64,
    pub gcd_nontrivial_apn: u64,
    pub gcd_nontrivial_not_apn: u64,
    /// APN tuples with nontrivial gcd and C = 0.
    pub gcd_nontrivial_apn_c_zero: u64,
}

impl RegimeCensus {
    fn merge(&mut self, o: &RegimeCensus) {
        self.regime_total += o.regime_total;
        self.gcd_trivial_apn += o.gcd_trivial_apn;
        self.gcd_trivial_not_apn += o.gcd_trivial_not_apn;
        self.gcd_nontrivial_apn += o.gcd_nontrivial_apn;
        self.gcd_nontrivial_not_apn += o.gcd_nontrivial_not_apn;
        self.gcd_nontrivial_apn_c_zero += o.gcd_nontrivial_apn_c_zero;
    }

    pub fn apn(&self) -> u64 {
        self.gcd_trivial_apn + self.gcd_nontrivial_apn
    }

    pub fn gcd_trivial(&self) -> u64 {
        self.gcd_trivial_apn + self.gcd_trivial_not_apn
    }

    pub fn gcd_nontrivial(&self) -> u64 {
        self.gcd_nontrivial_apn + self.gcd_nontrivial_not_apn
    }
}

/// Exhaustive census of the gcd regime over the filtered universe; gated like
/// `run_exhaustive`.
pub fn regime_census(
    spec: FieldSpec,
    filters: &Filters,
    shards: usize,
    force: bool,
) -> Result<RegimeCensus> {
    let field = Field::new(spec)?;
    let total = universe_size(&field);
    if total > EXHAUSTIVE_GATE && !force {
        return Err(GateError {
            what: "regime census",
            estimate: format!("{total} tuples (q = {})", field.q()),
            limit: format!("{EXHAUSTIVE_GATE} tuples"),
        }
        .into());
    }
    let parts: Vec<Result<RegimeCensus>> = std::thread::scope(|sc| {
        let handles: Vec<_> = split_ranges(total, shards.max(1))
            .into_iter()
            .map(|(lo, hi)| {
                let field = &field;
                sc.spawn(move || -> Result<RegimeCensus> {
                    let mut probe = Probe::new(field);
                    let mut out = RegimeCensus::default();
                    for idx in lo..hi {
                        let c = Coeffs::from_index(field, idx);
                        if !theory::in_gcd_regime(field, &c) || !filters.accepts(field, &c) {
                            continue;
                        }
                        out.regime_total += 1;
                        let apn = probe.is_apn(&c);
                        let (a2, a0) = sympoly::a2_a0_display(field, &c);
                        let trivial = sympoly::gcd_bivariate(&a2, &a0)?.total_degree() == Some(0);
                        match (trivial, apn) {
                            (true, true) => out.gcd_trivial_apn += 1,
                            (true, false) => out.gcd_trivial_not_apn += 1,
                            (false, true) => {
                                out.gcd_nontrivial_apn += 1;
                                out.gcd_nontrivial_apn_c_zero += c.c.is_zero() as u64;
                            }
                            (false, false) => out.gcd_nontrivial_not_apn += 1,
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("census shard panicked"))
            .collect()
    });
    let mut census = RegimeCensus {
        field: spec.to_string(),
        filters: filters.to_string(),
        ..Default::default()
    };
    for p in parts {
        census.merge(&p?);
    }
    Ok(census)
}

/// Brute-force every tuple of the field and tally the theory verdicts against it.
/// Gated to q <= 4 unless forced.
pub fn reconcile_exhaustive(
    spec: FieldSpec,
    shards: usize,
    force: bool,
) -> Result<theory::ReconcileReport> {
    let field = Field::new(spec)?;
    let total = universe_size(&field);
    if field.q() > 4 && !force {
        return Err(GateError {
            what: "reconciliation",
            estimate: format!("{total} tuples (q = {})", field.q()),
            limit: "q <= 4".into(),
        }
        .into());
    }
    let parts: Vec<theory::ReconcileReport> = std::thread::scope(|sc| {
        let handles: Vec<_> = split_ranges(total, shards.max(1))
            .into_iter()
            .map(|(lo, hi)| {
                let field = &field;
                sc.spawn(move || {
                    let mut probe = Probe::new(field);
                    let mut rep = theory::ReconcileReport::default();
                    for idx in lo..hi {
                        let c = Coeffs::from_index(field, idx);
                        let apn = probe.is_apn(&c);
                        rep.add(field, &c, apn);
                    }
                    rep
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("reconcile shard panicked"))
            .collect()
    });
    let mut rep = theory::ReconcileReport::default();
    for p in &parts {
        rep.merge(p);
    }
    Ok(rep)
}

/// One line of the hit stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRecord {
    pub field: String,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "E")]
    pub e: String,
    pub polynomial: String,
    pub is_apn: bool,
    pub is_permutation: bool,
    pub matched_cases: Vec<u8>,
    pub fingerprint_hash: String,
}

/// Ranks enter fingerprints only for q <= 4, where both matrices stay small.
pub fn default_fingerprint_opts(field: &Field) -> FingerprintOpts {
    let side = field.size() * field.size();
    FingerprintOpts {
        ranks: side <= 256,
        force_gate: false,
    }
}

pub fn hit_record(field: &Field, c: &Coeffs, opts: FingerprintOpts) -> Result<HitRecord> {
    let eval = Evaluator::new(field);
    let table = eval.table(c);
    let fp = fingerprint_table(field, &table, opts)?;
    let el = |z| field.format_power(z);
    Ok(HitRecord {
        field: field
            .spec()
            .alias()
            .map_or_else(|| field.spec().to_string(), str::to_string),
        a: el(c.a),
        b: el(c.b),
        c: el(c.c),
        d: el(c.d),
        e: el(c.e),
        polynomial: to_univariate(field, c).power_string(field),
        is_apn: ApnTester::new(field.len()).is_apn(&table),
        is_permutation: table_is_permutation(&table),
        matched_cases: theory::match_summary_cases(field, c).matched,
        fingerprint_hash: fp.hash,
    })
}

/// JSON-lines rendering of the hits, one record per line.
pub fn hits_jsonl(field: &Field, hits: &[Coeffs], opts: FingerprintOpts) -> Result<String> {
    let mut s = String::new();
    for c in hits {
        s.push_str(
            &serde_json::to_string(&hit_record(field, c, opts)?).expect("record serializes"),
        );
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_deterministic_and_bounded() {
        let mut a = SampleStream::new(7, 3);
        let mut b = SampleStream::new(7, 3);
        for _ in 0..100 {
            let x = a.below(1000);
            assert_eq!(x, b.below(1000));
            assert!(x < 1000);
        }
        assert_ne!(
            SampleStream::new(7, 3).next_u64(),
            SampleStream::new(7, 4).next_u64()
        );
        assert!(SampleStream::new(1, 1).below(1) == 0);
    }

    #[test]
    fn filter_strings_round_trip() {
        for s in [
            "none",
            "a-nonzero,no-c1c2",
            "a-nonzero,no-c1c2,cases=1;9,prioritized",
        ] {
            let f: Filters = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert_eq!("standard".parse::<Filters>().unwrap(), Filters::standard());
        assert!("cases=12".parse::<Filters>().is_err());
        assert!("bogus".parse::<Filters>().is_err());
    }

    #[test]
    fn ranges_cover_everything() {
        let r = split_ranges(10, 3);
        assert_eq!(r.first().unwrap().0, 0);
        assert_eq!(r.last().unwrap().1, 10);
        assert!(r.windows(2).all(|w| w[0].1 == w[1].0));
    }

    #[test]
    fn exhaustive_f4_counts_add_up() {
        let job = SearchJob::exhaustive(FieldSpec::F4, Filters::standard());
        let r = run_exhaustive(&job).unwrap();
        assert_eq!(r.counters.tested + r.counters.skipped_by_filter, 1024);
        assert_eq!(r.apn_hits.len() as u64, r.counters.apn);
    }

    #[test]
    fn gate_refuses_q16() {
        let job = SearchJob::exhaustive(FieldSpec::F256, Filters::none());
        assert!(matches!(run_exhaustive(&job), Err(Error::Gate(_))));
    }
}
