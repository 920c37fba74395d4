//! `hexapn`: search, verification, theory and invariant reports for Dillon hexanomials.

mod appendix;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hexapn::diffanalysis::{ddt, ddt_csv, is_apn_equation, DiffProfile};
use hexapn::hexanomial::to_univariate;
use hexapn::invariants::{fingerprint, partition_by_fingerprint, partition_csv, FingerprintOpts};
use hexapn::search::{self, Filters, SearchJob, SearchMode};
use hexapn::sympoly;
use hexapn::theory::{self, TheoryReport};
use hexapn::{Coeffs, Field, FieldSpec};

use output::{CliError, Outputs};

/// Exit statuses.
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_GATE: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "hexapn",
    version,
    about = "APN search and analysis for Dillon hexanomials over GF(q^2)"
)]
#[command(
    after_help = "Exit status: 0 success, 2 usage error, 3 bad input (field spec, tuple, degenerate \
system), 4 size gate refused (use --force-gate), 5 unreadable input or unwritable output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Field: F4, F16, F64, F256 or gf2:<2m>:<modulus hex>
    #[arg(long, default_value = "F4")]
    field: String,
    /// Output directory
    #[arg(long, env = "HEXAPN_OUT_DIR", default_value = "hexapn-out")]
    out: PathBuf,
    /// Run computations above their default size gates
    #[arg(long)]
    force_gate: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive or seeded random search; writes hits.jsonl and manifest.json
    Search {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        /// Number of random samples
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Seed for random mode (required there, ignored otherwise)
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on it
        #[arg(long)]
        shards: Option<usize>,
        /// Comma list of: none, standard, a-nonzero, no-c1c2, prioritized, cases=<i;j>
        #[arg(long, default_value = "standard")]
        filters: String,
        /// Keep only tuples matching one of these summary cases (comma list)
        #[arg(long, value_delimiter = ',')]
        cases: Vec<u8>,
        /// Exhaustive mode: also count APN tuples over the unfiltered universe
        #[arg(long)]
        dual_census: bool,
    },
    /// APN and permutation checks for one tuple
    Verify {
        #[command(flatten)]
        common: Common,
        /// Tuple A,B,C,D,E in a^k or hex notation
        #[arg(long)]
        tuple: String,
        /// Also write the full DDT as ddt.csv
        #[arg(long)]
        ddt: bool,
    },
    /// Coefficient conditions, summary cases and verdict for one tuple, or a reconciliation report
    Theory {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "reconcile")]
        tuple: Option<String>,
        /// Compare every verdict with brute force over the whole field (gated to q <= 4)
        #[arg(long)]
        reconcile: bool,
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Fingerprint of one tuple, or a partition of a tuple list by fingerprint
    Invariants {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "partition")]
        tuple: Option<String>,
        /// File with one tuple per line
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Include Gamma and Delta ranks
        #[arg(long)]
        ranks: bool,
    },
    /// Build and check the variety system; dumps the polynomials
    Sympoly {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tuple: String,
        /// Count off-plane rational points of F1 = F2 = 0 (gated to q <= 4)
        #[arg(long)]
        scan: bool,
    },
    /// Regenerate the representative tables and the gcd-regime census as CSV
    ReproAppendix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shards: Option<usize>,
        /// Skip the q = 4 census
        #[arg(long)]
        quick: bool,
    },
}

fn default_shards(s: Option<usize>) -> usize {
    s.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn open_field(s: &str) -> Result<Field, CliError> {
    let spec: FieldSpec = s
        .parse()
        .map_err(|e: hexapn::FieldError| CliError::Input(e.to_string()))?;
    Field::new(spec).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_tuple(k: &Field, s: &str) -> Result<Coeffs, CliError> {
    Coeffs::parse(k, s).map_err(|e| CliError::Input(e.to_string()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json renders") + "\n"
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Search {
            common,
            mode,
            samples,
            seed,
            shards,
            filters,
            cases,
            dual_census,
        } => {
            let k = open_field(&common.field)?;
            let mut filters: Filters = filters.parse()?;
            if !cases.is_empty() {
                let mut set = filters.cases.take().unwrap_or_default();
                for i in cases {
                    if !(1..=11).contains(&i) {
                        return Err(CliError::Input(format!(
                            "bad case id {i} (expected 1..=11)"
                        )));
                    }
                    set.insert(i);
                }
                filters.cases = Some(set);
            }
            let mode = match mode {
                Mode::Exhaustive => SearchMode::Exhaustive,
                Mode::Random => {
                    let seed =
                        seed.ok_or_else(|| CliError::Input("random mode needs --seed".into()))?;
                    SearchMode::Random { samples, seed }
                }
            };
            let job = SearchJob {
                field: k.spec(),
                mode,
                filters,
                shards: default_shards(shards),
                dual_census,
                force_gate: common.force_gate,
            };
            let result = search::run(&job)?;
            let hits =
                search::hits_jsonl(&k, &result.apn_hits, search::default_fingerprint_opts(&k))?;
            let manifest = serde_json::to_value(&result.manifest).expect("manifest serializes");
            let mut out = Outputs::new(&common.out, "search", &common.field);
            out.add("hits.jsonl", hits);
            out.set_result(manifest.clone());
            out.commit()?;
            print!("{}", pretty(&manifest));
        }
        Command::Verify {
            common,
            tuple,
            ddt: want_ddt,
        } => {
            let k = open_field(&common.field)?;
            let c = parse_tuple(&k, &tuple)?;
            let p = DiffProfile::new(&k, &c);
            let report = json!({
                "field": k.spec().to_string(),
                "tuple": c.format(&k),
                "polynomial": to_univariate(&k, &c).power_string(&k),
                "uniformity": p.uniformity,
                "is_apn": p.is_apn,
                "is_apn_equation": is_apn_equation(&k, &c),
                "is_permutation": p.is_permutation,
                "diff_spectrum": p.spectrum_string(),
            });
            let mut out = Outputs::new(&common.out, "verify", &common.field);
            out.add("verify.json", pretty(&report));
            if want_ddt {
                out.add("ddt.csv", ddt_csv(&ddt(&k, &c)));
            }
            out.set_result(report.clone());
            out.commit()?;
            print!("{}", pretty(&report));
        }
        Command::Theory {
            common,
            tuple,
            reconcile,
            shards,
        } => {
            let k = open_field(&common.field)?;
            let report = if reconcile {
                let rep = search::reconcile_exhaustive(
                    k.spec(),
                    default_shards(shards),
                    common.force_gate,
                )?;
                let mut v = serde_json::to_value(&rep).expect("report serializes");
                v["field"] = json!(k.spec().to_string());
                v["c1_c2_violations"] = json!(rep.c1_c2_violations());
                v["case9_resolution"] = json!(rep.case9_resolution());
                v["caveat"] = json!(theory::ASYMPTOTIC_CAVEAT);
                v
            } else {
                let c = parse_tuple(&k, tuple.as_deref().unwrap_or_default())?;
                TheoryReport::new(&k, &c).to_json(&k, &c)
            };
            let mut out = Outputs::new(&common.out, "theory", &common.field);
            out.add("theory.json", pretty(&report));
            out.set_result(report.clone());
            out.commit()?;
            print!("{}", pretty(&report));
        }
        Command::Invariants {
            common,
            tuple,
            partition,
            ranks,
        } => {
            let k = open_field(&common.field)?;
            let opts = FingerprintOpts {
                ranks,
                force_gate: common.force_gate,
            };
            let mut out = Outputs::new(&common.out, "invariants", &common.field);
            if let Some(path) = partition {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                let mut items = Vec::new();
                for line in text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                {
                    items.push((k.spec(), parse_tuple(&k, line)?));
                }
                let groups = partition_by_fingerprint(&items, opts)?;
                let csv = partition_csv(&k, &groups);
                out.add("partition.csv", csv.clone());
                out.set_result(json!({"tuples": items.len(), "groups": groups.len()}));
                out.commit()?;
                print!("{csv}");
            } else {
                let c = parse_tuple(&k, tuple.as_deref().unwrap_or_default())?;
                let fp = fingerprint(&k, &c, opts)?;
                let v = serde_json::to_value(&fp).expect("fingerprint serializes");
                out.add("fingerprint.json", pretty(&v));
                out.set_result(v.clone());
                out.commit()?;
                print!("{}", pretty(&v));
            }
        }
        Command::Sympoly {
            common,
            tuple,
            scan,
        } => {
            let k = open_field(&common.field)?;
            let c = parse_tuple(&k, &tuple)?;
            let sys = sympoly::build_variety_system(&k, &c)?;
            let res = sympoly::lowest_part_resultant_check(&k, &c)?;
            let mut report = json!({
                "field": k.spec().to_string(),
                "tuple": c.format(&k),
                "checks": sys.checks,
                "all_identities_hold": sys.checks.all_hold(),
                "lowest_part_displays_match": res.displays_match_parts,
                "resultant": res.resultant.to_string(),
                "resultant_identity_holds": res.identity_holds,
                "in_gcd_regime": theory::in_gcd_regime(&k, &c),
            });
            if theory::in_gcd_regime(&k, &c) {
                let l = sympoly::gcd_bivariate(&sys.a2, &sys.a0)?;
                report["gcd_a2_a0"] = json!(l.to_string());
                if scan {
                    let r = sympoly::classify_gcd_regime(&k, &c, common.force_gate)?;
                    report["gcd_regime_class"] = json!(r.class);
                }
            }
            if scan {
                let s = sympoly::scan_w(&k, &c, common.force_gate)?;
                report["w_off_plane_points"] = json!(s.off_plane_count);
                report["w_points"] = json!(s.on_system);
            }
            let mut out = Outputs::new(&common.out, "sympoly", &common.field);
            for (name, p) in [
                ("f1", &sys.f1),
                ("f2", &sys.f2),
                ("g", &sys.g),
                ("gbar", &sys.gbar),
                ("a2", &sys.a2),
                ("a1", &sys.a1),
                ("a0", &sys.a0),
                ("g1", &sys.g1),
                ("g2", &sys.g2),
                ("g3", &sys.g3),
            ] {
                out.add(&format!("{name}.poly"), p.dump());
            }
            out.add("sympoly.json", pretty(&report));
            out.set_result(report.clone());
            out.commit()?;
            print!("{}", pretty(&report));
        }
        Command::ReproAppendix {
            common,
            shards,
            quick,
        } => {
            let files = appendix::build(default_shards(shards), quick, common.force_gate)?;
            let mut out = Outputs::new(&common.out, "repro-appendix", &common.field);
            let names: Vec<String> = files.iter().map(|f| f.0.clone()).collect();
            for (name, body) in files {
                out.add(&name, body);
            }
            out.set_result(json!({ "files": names }));
            out.commit()?;
            for n in names {
                println!("{}", common.out.join(n).display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}
