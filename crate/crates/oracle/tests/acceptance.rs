//! Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.
//! Expected values are exact; they are pinned in the constants below.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use hexapn::diffanalysis::DiffProfile;
use hexapn::invariants::fingerprint;
use hexapn::search::{self, default_fingerprint_opts, Filters, SampleStream, SearchJob};
use hexapn::sympoly::{build_variety_system, lowest_part_resultant_check, scan_w};
use hexapn::theory::cond_c1_c2;
use hexapn::{Coeffs, Field, FieldSpec};
use hexapn_oracle::RefField;

const Q2_APN: u64 = 390;
const Q4_APN: u64 = 28_170;
const APN_PERMUTATIONS: u64 = 0;

const CENSUS_TOTAL: u64 = 288;
const CENSUS_NONTRIVIAL_NOT_APN: u64 = 244;
const CENSUS_NONTRIVIAL_APN: u64 = 16;
const CENSUS_TRIVIAL_NOT_APN: u64 = 28;
const CENSUS_TRIVIAL_APN: u64 = 0;

const Q4_EXCEPTIONAL_APN: u64 = 9_120;

const RANDOM_TUPLES: u64 = 1_000;
const SEED: u64 = 0x5eed_0001;

/// Class representatives as (field, tuple).
const REPRESENTATIVES: &[(&str, &str)] = &[
    ("F4", "a,0,0,0,a"),
    ("F16", "a,0,0,a,0"),
    ("F64", "a^23,a^23,a^47,a^25,a^29"),
    ("F64", "a^35,a^46,a^6,a^20,a^31"),
    ("F64", "a^37,0,a^41,a^28,0"),
    ("F256", "a^210,a^34,a^125,a^170,a^207"),
    ("F256", "a^25,a^51,a^34,a^68,a^17"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn shards() -> usize {
    std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .min(16)
}

fn field(spec: FieldSpec) -> Field {
    Field::new(spec).expect("named fields are valid")
}

fn oracle_field(k: &Field) -> RefField {
    RefField::new(k.m(), k.spec().modulus as u32)
}

fn random_tuple(k: &Field, s: &mut SampleStream) -> Coeffs {
    let n = k.size();
    let v: Vec<u32> = (0..5).map(|_| s.below(n) as u32).collect();
    Coeffs::from_bits([v[0], v[1], v[2], v[3], v[4]])
}

/// Exhaustive search with the standard filters; at q = 2 the APN count is also redone by the oracle.
fn exhaustive_count(spec: FieldSpec, expected: u64) -> Outcome {
    let job = SearchJob::exhaustive(spec, Filters::standard()).with_shards(shards());
    let res = search::run(&job).expect("exhaustive search");
    let m = &res.manifest;
    let mut detail = format!(
        "tested {} APN {} permutations {} APN permutations {} (expected APN {expected}, APN permutations {APN_PERMUTATIONS})",
        m.counters.tested, m.counters.apn, m.counters.permutations, m.apn_permutations
    );
    let mut pass = m.counters.apn == expected && m.apn_permutations == APN_PERMUTATIONS;
    let k = field(spec);
    if k.q() == 2 {
        let o = oracle_field(&k);
        let filters = Filters::standard();
        let oracle_apn = (0..search::universe_size(&k))
            .map(|i| Coeffs::from_index(&k, i))
            .filter(|c| filters.accepts(&k, c))
            .filter(|c| hexapn_oracle::is_apn(&o.table(c.as_array().map(|z| z.0))))
            .count() as u64;
        detail.push_str(&format!("; oracle APN {oracle_apn}"));
        pass &= oracle_apn == m.counters.apn;
    }
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    exhaustive_count(FieldSpec::F4, Q2_APN)
}

fn criterion_2() -> Outcome {
    exhaustive_count(FieldSpec::F16, Q4_APN)
}

fn criterion_3() -> Outcome {
    let c = search::regime_census(FieldSpec::F4, &Filters::standard(), shards(), false)
        .expect("census");
    let pass = c.regime_total == CENSUS_TOTAL
        && c.gcd_nontrivial_not_apn == CENSUS_NONTRIVIAL_NOT_APN
        && c.gcd_nontrivial_apn == CENSUS_NONTRIVIAL_APN
        && c.gcd_nontrivial_apn_c_zero == CENSUS_NONTRIVIAL_APN
        && c.gcd_trivial_not_apn == CENSUS_TRIVIAL_NOT_APN
        && c.gcd_trivial_apn == CENSUS_TRIVIAL_APN;
    Outcome {
        pass,
        detail: format!(
            "regime {} | gcd != 1: {} non-APN, {} APN ({} with C = 0) | gcd = 1: {} non-APN, {} APN \
             (expected {CENSUS_TOTAL} | {CENSUS_NONTRIVIAL_NOT_APN}, {CENSUS_NONTRIVIAL_APN} ({CENSUS_NONTRIVIAL_APN}) | \
             {CENSUS_TRIVIAL_NOT_APN}, {CENSUS_TRIVIAL_APN})",
            c.regime_total,
            c.gcd_nontrivial_not_apn,
            c.gcd_nontrivial_apn,
            c.gcd_nontrivial_apn_c_zero,
            c.gcd_trivial_not_apn,
            c.gcd_trivial_apn
        ),
    }
}

fn criterion_4() -> Outcome {
    let c = search::regime_census(FieldSpec::F16, &Filters::standard(), shards(), false)
        .expect("census");
    Outcome {
        pass: c.gcd_nontrivial_apn == Q4_EXCEPTIONAL_APN,
        detail: format!(
            "regime {} | APN with gcd != 1: {} (expected {Q4_EXCEPTIONAL_APN}) | APN with gcd = 1: {}",
            c.regime_total, c.gcd_nontrivial_apn, c.gcd_trivial_apn
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    for &(alias, tuple) in REPRESENTATIVES {
        let k = field(alias.parse().expect("alias"));
        let c = Coeffs::parse(&k, tuple).expect("tuple");
        let p = DiffProfile::new(&k, &c);
        let o = oracle_field(&k);
        let t = o.table(c.as_array().map(|z| z.0));
        let (o_apn, o_perm) = (hexapn_oracle::is_apn(&t), hexapn_oracle::is_permutation(&t));
        if !p.is_apn || p.is_permutation || o_apn != p.is_apn || o_perm != p.is_permutation {
            bad.push(format!(
                "{alias} ({tuple}): uniformity {} permutation {} (oracle uniformity {})",
                p.uniformity,
                p.is_permutation,
                hexapn_oracle::uniformity(&t)
            ));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{} representatives APN and not permutations",
                REPRESENTATIVES.len()
            )
        } else {
            format!(
                "{} of {} fail: {}",
                bad.len(),
                REPRESENTATIVES.len(),
                bad.join("; ")
            )
        },
    }
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for spec in [FieldSpec::F4, FieldSpec::F16, FieldSpec::F64] {
        let k = field(spec);
        let (mut checked, mut failed, mut degenerate) = (0u64, 0u64, 0u64);
        let mut i = 0;
        while checked < RANDOM_TUPLES {
            let mut s = SampleStream::new(SEED ^ k.q(), i);
            i += 1;
            let c = random_tuple(&k, &mut s);
            if cond_c1_c2(&k, &c) != (false, false) {
                continue;
            }
            match build_variety_system(&k, &c) {
                Ok(sys) => {
                    checked += 1;
                    failed += !sys.checks.all_hold() as u64;
                }
                Err(_) => degenerate += 1,
            }
        }
        pass &= failed == 0;
        parts.push(format!(
            "q={}: {failed}/{checked} fail ({degenerate} degenerate draws skipped)",
            k.q()
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut tally = |label: String, k: &Field, tuples: &mut dyn Iterator<Item = Coeffs>| {
        let (mut n, mut failed) = (0u64, 0u64);
        for c in tuples {
            let r = lowest_part_resultant_check(k, &c).expect("resultant");
            n += 1;
            failed += !(r.identity_holds && r.displays_match_parts) as u64;
        }
        pass &= failed == 0 && n > 0;
        parts.push(format!("{label}: {failed}/{n} fail"));
    };
    let k = field(FieldSpec::F4);
    let all = (0..search::universe_size(&k))
        .map(|i| Coeffs::from_index(&k, i))
        .filter(|c| !c.b.is_zero());
    tally("q=2 exhaustive B != 0".into(), &k, &mut all.into_iter());
    for spec in [FieldSpec::F16, FieldSpec::F64] {
        let k = field(spec);
        let mut it =
            (0..RANDOM_TUPLES).map(|i| random_tuple(&k, &mut SampleStream::new(SEED + k.q(), i)));
        tally(format!("q={} random", k.q()), &k, &mut it);
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_8() -> Outcome {
    let k = field(FieldSpec::F4);
    let o = oracle_field(&k);
    let (mut n, mut bad) = (0u64, Vec::new());
    for i in 0..search::universe_size(&k) {
        let c = Coeffs::from_index(&k, i);
        let scan = scan_w(&k, &c, false).expect("scan");
        let apn = hexapn_oracle::is_apn(&o.table(c.as_array().map(|z| z.0)));
        n += 1;
        if apn != (scan.off_plane_count == 0) {
            bad.push(c.format(&k));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} of {n} tuples violate is_apn <=> no off-plane point{}",
            bad.len(),
            bad.first()
                .map_or(String::new(), |c| format!(" (first: {c})"))
        ),
    }
}

fn distinct_fingerprints(spec: FieldSpec) -> (u64, usize) {
    let job = SearchJob::exhaustive(spec, Filters::standard()).with_shards(shards());
    let hits = search::run(&job).expect("search").apn_hits;
    let k = field(spec);
    let opts = default_fingerprint_opts(&k);
    let chunk = hits.len().div_ceil(shards()).max(1);
    let sets: Vec<BTreeSet<String>> = std::thread::scope(|sc| {
        let handles: Vec<_> = hits
            .chunks(chunk)
            .map(|part| {
                let k = &k;
                sc.spawn(move || {
                    part.iter()
                        .map(|c| fingerprint(k, c, opts).expect("fingerprint").hash)
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker"))
            .collect()
    });
    let all: BTreeSet<String> = sets.into_iter().flatten().collect();
    (hits.len() as u64, all.len())
}

fn criterion_9() -> Outcome {
    let (n2, d2) = distinct_fingerprints(FieldSpec::F4);
    let (n4, d4) = distinct_fingerprints(FieldSpec::F16);
    Outcome {
        pass: d2 == 1 && d4 == 1,
        detail: format!(
            "q=2: {n2} hits, {d2} distinct fingerprint(s); q=4: {n4} hits, {d4} distinct fingerprint(s) (ranks included)"
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for spec in [FieldSpec::F4, FieldSpec::F16] {
        let k = field(spec);
        let r = search::reconcile_exhaustive(spec, shards(), false).expect("reconcile");
        pass &= r.c1_c2_violations() == 0;
        parts.push(format!(
            "q={}: C1/C2 contradictions {} {:?}; case 9: {}",
            k.q(),
            r.c1_c2_violations(),
            r.iff_violations,
            r.case9_resolution()
        ));
    }
    Outcome {
        pass,
        detail: parts.join(" | "),
    }
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture or a name filter are accepted and ignored.
    let criteria: [(&str, Check); 10] = [
        ("exhaustive q=2 APN count", criterion_1),
        ("exhaustive q=4 APN count", criterion_2),
        ("gcd regime census q=2", criterion_3),
        ("exceptional census q=4", criterion_4),
        ("table representatives", criterion_5),
        ("symbolic identities", criterion_6),
        ("lowest-part resultant", criterion_7),
        ("geometric vs differential", criterion_8),
        ("fingerprint coherence", criterion_9),
        ("theory reconciliation", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = check();
        failures += !out.pass as u32;
        println!(
            "{} criterion {:>2} {name}: {} [{:.1}s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() as u32 - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
