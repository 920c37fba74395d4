use hexapn::diffanalysis::{is_apn_equation, is_permutation};
use hexapn::search::{
    self, default_fingerprint_opts, hits_jsonl, reconcile_exhaustive, regime_census, Filters,
    SearchJob, SearchMode,
};
use hexapn::theory::predict_verdict;
use hexapn::{Coeffs, Error, Field, FieldSpec};
use hexapn_oracle::RefField;
use proptest::prelude::*;

fn oracle_apn(k: &Field, c: &Coeffs) -> bool {
    let o = RefField::new(k.m(), k.spec().modulus as u32);
    hexapn_oracle::is_apn(&o.table(c.as_array().map(|z| z.0)))
}

#[test]
fn exhaustive_f16_is_shard_invariant() {
    let one = search::run(&SearchJob::exhaustive(FieldSpec::F16, Filters::standard())).unwrap();
    let five =
        search::run(&SearchJob::exhaustive(FieldSpec::F16, Filters::standard()).with_shards(5))
            .unwrap();
    assert_eq!(one.counters, five.counters);
    assert_eq!(one.apn_hits, five.apn_hits);
    assert_eq!(one.manifest.apn_permutations, 0);
    assert_eq!(five.manifest.shards, 5);
}

#[test]
fn dual_census_counts_the_whole_universe() {
    let mut job = SearchJob::exhaustive(FieldSpec::F4, Filters::standard());
    job.dual_census = true;
    let r = search::run(&job).unwrap();
    let u = r.manifest.unfiltered.expect("dual census requested");
    assert_eq!(u.tested, 1024);
    assert_eq!(r.counters.tested + r.counters.skipped_by_filter, 1024);
    assert!(u.apn >= r.counters.apn);
    let k = Field::new(FieldSpec::F4).unwrap();
    let brute = (0..1024)
        .filter(|&i| oracle_apn(&k, &Coeffs::from_index(&k, i)))
        .count() as u64;
    assert_eq!(u.apn, brute);
}

#[test]
fn exhaustive_gate_refuses_f256() {
    let r = search::run(&SearchJob::exhaustive(FieldSpec::F256, Filters::standard()));
    assert!(matches!(r, Err(Error::Gate(_))));
}

#[test]
fn random_search_is_reproducible_across_shards() {
    let job = SearchJob::random(FieldSpec::F64, 3000, 42, Filters::standard());
    let a = search::run(&job).unwrap();
    let b = search::run(&job.clone().with_shards(8)).unwrap();
    assert_eq!(a.counters, b.counters);
    assert_eq!(a.apn_hits, b.apn_hits);
    let c = search::run(&SearchJob::random(
        FieldSpec::F64,
        3000,
        43,
        Filters::standard(),
    ))
    .unwrap();
    assert_ne!(a.counters, c.counters);
    assert_eq!(
        a.manifest.mode,
        SearchMode::Random {
            samples: 3000,
            seed: 42
        }
    );
}

#[test]
fn prioritized_random_search_over_f64_finds_verified_hits() {
    let job = SearchJob::random(
        FieldSpec::F64,
        400,
        7,
        "standard,prioritized".parse().unwrap(),
    )
    .with_shards(4);
    let r = search::run(&job).unwrap();
    assert_eq!(r.counters.tested, 400);
    assert!(!r.apn_hits.is_empty());
    let k = Field::new(FieldSpec::F64).unwrap();
    for c in &r.apn_hits {
        assert!(oracle_apn(&k, c), "{}", c.format(&k));
        assert!(is_apn_equation(&k, c));
        assert!(!is_permutation(&k, c));
        assert!(!predict_verdict(&k, c).is_excluded());
    }
}

#[test]
fn hit_records_are_one_json_object_per_line() {
    let r = search::run(&SearchJob::exhaustive(FieldSpec::F4, Filters::standard())).unwrap();
    let k = Field::new(FieldSpec::F4).unwrap();
    let text = hits_jsonl(&k, &r.apn_hits[..5], default_fingerprint_opts(&k)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for l in lines {
        assert!(l.starts_with('{') && l.ends_with('}'));
        assert!(l.contains("\"is_apn\":true"));
        assert!(l.contains("\"fingerprint_hash\":\""));
    }
}

#[test]
fn census_and_reconcile_on_f4() {
    let c = regime_census(FieldSpec::F4, &Filters::standard(), 2, false).unwrap();
    assert_eq!(c.regime_total, c.gcd_trivial() + c.gcd_nontrivial());
    assert_eq!(c.apn(), c.gcd_trivial_apn + c.gcd_nontrivial_apn);
    assert!(c.gcd_nontrivial_apn_c_zero <= c.gcd_nontrivial_apn);
    let unfiltered = regime_census(FieldSpec::F4, &Filters::none(), 2, false).unwrap();
    assert!(unfiltered.regime_total >= c.regime_total);

    let r = reconcile_exhaustive(FieldSpec::F4, 2, false).unwrap();
    assert_eq!(r.total, 1024);
    assert_eq!(r.empirical_apn, 768);
    assert!(r.case9_resolution().starts_with("neither reading agrees"));
    assert!(matches!(
        reconcile_exhaustive(FieldSpec::F64, 1, false),
        Err(Error::Gate(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filter_strings_round_trip(a in any::<bool>(), b in any::<bool>(), p in any::<bool>(), cases in prop::collection::btree_set(1u8..=11, 0..4)) {
        let f = Filters {
            require_a_nonzero: a,
            exclude_c1_c2: b,
            cases: (!cases.is_empty()).then_some(cases),
            prioritized: p,
        };
        prop_assert_eq!(f.to_string().parse::<Filters>().unwrap(), f);
    }

    #[test]
    fn random_hits_are_apn_under_any_seed(seed in any::<u64>()) {
        let r = search::run(&SearchJob::random(FieldSpec::F16, 200, seed, Filters::standard())).unwrap();
        let k = Field::new(FieldSpec::F16).unwrap();
        prop_assert_eq!(r.counters.tested, 200);
        for c in &r.apn_hits {
            prop_assert!(oracle_apn(&k, c));
            prop_assert!(Filters::standard().accepts(&k, c));
        }
    }
}
