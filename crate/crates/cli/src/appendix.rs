//! Machine-readable versions of the class-representative tables and the gcd-regime census.

use hexapn::diffanalysis::DiffProfile;
use hexapn::hexanomial::to_univariate;
use hexapn::invariants::fingerprint;
use hexapn::search::{default_fingerprint_opts, regime_census, Filters};
use hexapn::theory::match_summary_cases;
use hexapn::{Coeffs, Field, FieldSpec};

use crate::output::CliError;

/// (field alias, class, reported count, tuple) for every representative row.
pub const REPRESENTATIVES: &[(&str, u32, u64, &str)] = &[
    ("F4", 1, 390, "a,0,0,0,a"),
    ("F16", 1, 28170, "a,0,0,a,0"),
    ("F64", 1, 83, "a^23,a^23,a^47,a^25,a^29"),
    ("F64", 2, 133, "a^35,a^46,a^6,a^20,a^31"),
    ("F64", 3, 2, "a^37,0,a^41,a^28,0"),
    ("F256", 1, 28, "a^210,a^34,a^125,a^170,a^207"),
    ("F256", 2, 6, "a^25,a^51,a^34,a^68,a^17"),
];

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn representative_table(alias: &str) -> Result<String, CliError> {
    let spec: FieldSpec = alias
        .parse()
        .map_err(|e: hexapn::FieldError| CliError::Input(e.to_string()))?;
    let k = Field::new(spec).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rows = Vec::new();
    for &(f, class, count, tuple) in REPRESENTATIVES.iter().filter(|r| r.0 == alias) {
        let c = Coeffs::parse(&k, tuple)?;
        let p = DiffProfile::new(&k, &c);
        let fp = fingerprint(&k, &c, default_fingerprint_opts(&k))?;
        let cases: Vec<String> = match_summary_cases(&k, &c)
            .matched
            .iter()
            .map(u8::to_string)
            .collect();
        let mut row = vec![f.to_string(), class.to_string(), count.to_string()];
        row.extend(c.as_array().iter().map(|z| k.format_power(*z)));
        row.extend([
            to_univariate(&k, &c).power_string(&k),
            p.is_apn.to_string(),
            p.is_permutation.to_string(),
            fp.hash,
            cases.join(";"),
        ]);
        rows.push(row);
    }
    csv_string(
        &[
            "field",
            "class",
            "count",
            "A",
            "B",
            "C",
            "D",
            "E",
            "polynomial",
            "is_apn",
            "is_permutation",
            "fingerprint_hash",
            "matched_cases",
        ],
        rows,
    )
}

/// All table files as (name, contents); nothing is written here.
pub fn build(shards: usize, quick: bool, force: bool) -> Result<Vec<(String, String)>, CliError> {
    let mut files = Vec::new();
    for alias in ["F4", "F16", "F64", "F256"] {
        files.push((format!("ccz_{alias}.csv"), representative_table(alias)?));
    }
    let fields: &[FieldSpec] = if quick {
        &[FieldSpec::F4]
    } else {
        &[FieldSpec::F4, FieldSpec::F16]
    };
    let mut rows = Vec::new();
    for &spec in fields {
        let c = regime_census(spec, &Filters::standard(), shards, force)?;
        rows.push(vec![
            spec.alias().unwrap_or_default().to_string(),
            c.filters.clone(),
            c.regime_total.to_string(),
            c.gcd_nontrivial_not_apn.to_string(),
            c.gcd_nontrivial_apn.to_string(),
            c.gcd_nontrivial_apn_c_zero.to_string(),
            c.gcd_trivial_not_apn.to_string(),
            c.gcd_trivial_apn.to_string(),
        ]);
    }
    files.push((
        "regime_census.csv".into(),
        csv_string(
            &[
                "field",
                "filters",
                "regime_total",
                "gcd_nontrivial_not_apn",
                "gcd_nontrivial_apn",
                "gcd_nontrivial_apn_c_zero",
                "gcd_trivial_not_apn",
                "gcd_trivial_apn",
            ],
            rows,
        )?,
    ));
    Ok(files)
}
