use hexapn::diffanalysis::{
    ddt, is_apn_ddt, is_apn_equation, is_apn_full, is_permutation, DiffProfile,
};
use hexapn::hexanomial::{
    evaluate, exponent_collisions, to_univariate, value_table, Evaluator, UnivariateForm,
};
use hexapn::walsh::{extended_walsh_spectrum, walsh_coefficient};
use hexapn::{Coeffs, Elem, Field, FieldSpec};
use hexapn_oracle::RefField;
use proptest::prelude::*;

fn oracle(k: &Field) -> RefField {
    RefField::new(k.m(), k.spec().modulus as u32)
}

fn bits(c: &Coeffs) -> [u32; 5] {
    c.as_array().map(|z| z.0)
}

fn spec_for(m: u32) -> FieldSpec {
    FieldSpec::named()[m as usize - 1].1
}

fn tuple(m: u32) -> impl Strategy<Value = (u32, [u32; 5])> {
    let n = 1u32 << (2 * m);
    (Just(m), [0..n, 0..n, 0..n, 0..n, 0..n])
}

fn any_tuple() -> impl Strategy<Value = (u32, [u32; 5])> {
    (1u32..=4).prop_flat_map(tuple)
}

#[test]
fn apn_testers_agree_with_oracle_on_all_of_f4() {
    let k = Field::new(FieldSpec::F4).unwrap();
    let o = oracle(&k);
    for i in 0..1024 {
        let c = Coeffs::from_index(&k, i);
        let t = o.table(bits(&c));
        let apn = hexapn_oracle::is_apn(&t);
        assert_eq!(is_apn_ddt(&k, &c), apn, "{}", c.format(&k));
        assert_eq!(is_apn_full(&k, &c), apn);
        assert_eq!(is_apn_equation(&k, &c), apn);
        assert_eq!(is_permutation(&k, &c), hexapn_oracle::is_permutation(&t));
    }
}

#[test]
fn ddt_rows_sum_to_field_size_and_entries_are_even() {
    let k = Field::new(FieldSpec::F16).unwrap();
    let c = Coeffs::parse(&k, "a,0,0,a,0").unwrap();
    let d = ddt(&k, &c);
    assert_eq!(d[0][0], 16);
    for row in &d {
        assert_eq!(row.iter().sum::<u32>(), 16);
        assert!(row.iter().all(|v| v % 2 == 0));
    }
    let p = DiffProfile::new(&k, &c);
    assert!(p.is_apn);
    assert_eq!(p.spectrum_string(), "0:120,2:120");
}

#[test]
fn exponent_collisions_only_at_q2() {
    // x^3 = x^{q+1} and x^{2q+2} = x^{3q} when q = 2
    assert_eq!(exponent_collisions(2), vec![vec![0, 1], vec![4, 5]]);
    for q in [4, 8, 16] {
        assert!(exponent_collisions(q).is_empty());
    }
    let k = Field::new(FieldSpec::F4).unwrap();
    let f = to_univariate(&k, &Coeffs::parse(&k, "1,1,0,0,1").unwrap());
    // the x^3 terms cancel and so do the x^6 terms
    assert_eq!(f.terms.len(), 0);
}

#[test]
fn univariate_text_round_trip() {
    let k = Field::new(FieldSpec::F64).unwrap();
    let c = Coeffs::parse(&k, "a^23,a^23,a^47,a^25,a^29").unwrap();
    let f = to_univariate(&k, &c);
    let s = f.power_string(&k);
    assert_eq!(
        s,
        "x^24 + a^29 x^18 + a^47 x^17 + a^25 x^10 + a^23 x^9 + a^23 x^3"
    );
    assert_eq!(UnivariateForm::parse(&k, &s).unwrap(), f);
    let latex = "x^{24}+a^{29}x^{18}+a^{47}x^{17}+a^{25}x^{10}+a^{23}x^{9}+a^{23}x^{3}";
    assert_eq!(UnivariateForm::parse(&k, latex).unwrap(), f);
}

#[test]
fn walsh_matches_oracle_and_parseval_on_f16() {
    let k = Field::new(FieldSpec::F16).unwrap();
    let o = oracle(&k);
    let c = Coeffs::parse(&k, "a,0,0,a,0").unwrap();
    let t = o.table(bits(&c));
    for b in 1..16u32 {
        let mut sum = 0;
        for a in 0..16u32 {
            let w = walsh_coefficient(&k, &c, Elem(a), Elem(b));
            assert_eq!(w, o.walsh(&t, a, b));
            sum += w * w;
        }
        assert_eq!(sum, 256);
    }
    let s = extended_walsh_spectrum(&k, &c);
    assert_eq!(s.total(), 16 * 15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_paths_agree((m, raw) in any_tuple()) {
        let k = Field::new(spec_for(m)).unwrap();
        let o = oracle(&k);
        let c = Coeffs::from_bits(raw);
        let table = value_table(&k, &c);
        let ev = Evaluator::new(&k).table(&c);
        let u = to_univariate(&k, &c);
        prop_assert_eq!(&table, &ev);
        prop_assert_eq!(&table, &o.table(raw));
        for x in k.elements() {
            prop_assert_eq!(u.eval(&k, x), evaluate(&k, &c, x));
        }
    }

    #[test]
    fn apn_and_uniformity_match_oracle((m, raw) in (1u32..=3).prop_flat_map(tuple)) {
        let k = Field::new(spec_for(m)).unwrap();
        let o = oracle(&k);
        let c = Coeffs::from_bits(raw);
        let t = o.table(raw);
        let p = DiffProfile::new(&k, &c);
        prop_assert_eq!(p.uniformity, hexapn_oracle::uniformity(&t));
        prop_assert_eq!(is_apn_ddt(&k, &c), p.is_apn);
        prop_assert_eq!(is_apn_equation(&k, &c), p.is_apn);
    }

    #[test]
    fn input_scaling_preserves_differential_and_walsh_spectra((m, raw) in (1u32..=3).prop_flat_map(tuple), l in 1u32..64) {
        let k = Field::new(spec_for(m)).unwrap();
        let lambda = Elem(l % (k.size() as u32 - 1) + 1);
        let c = Coeffs::from_bits(raw);
        let (scaled, lead) = c.input_scaled(&k, lambda);
        let inv = k.inv(lead).unwrap();
        let arr = scaled.as_array().map(|z| k.mul(z, inv));
        let g = Coeffs::new(arr[0], arr[1], arr[2], arr[3], arr[4]);
        for x in k.elements() {
            prop_assert_eq!(k.mul(lead, evaluate(&k, &g, x)), evaluate(&k, &c, k.mul(lambda, x)));
        }
        prop_assert_eq!(DiffProfile::new(&k, &g).spectrum, DiffProfile::new(&k, &c).spectrum);
        prop_assert_eq!(extended_walsh_spectrum(&k, &g), extended_walsh_spectrum(&k, &c));
    }
}
