//! Deterministic experiment runner: every pipeline as a subcommand with
//! file-based configuration and machine-readable outputs.
//!
//! Exit codes: 0 success, 1 validation error, 2 numeric failure,
//! 3 selftest failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use billiards_core::displacement::{
    periodic_approx_displacement, quadrilateral_area, temporal_displacement, Quadrilateral,
};
use billiards_core::error::Error;
use billiards_core::geometry::{check_non_eclipse, Table};
use billiards_core::orbits::{marked_length_spectrum, solve_periodic_orbit};
use billiards_core::rigidity::{
    bowen_dimension, box_counting_stable_slice, conjugacy_consequence_report,
    gap_perturbation_experiment, iso_length_spectral_report, match_periodic_orbits, trace_cover,
    AlphabetMap, GapChoice,
};
use billiards_core::symbolic::Word;

#[derive(Parser)]
#[command(name = "billiards", about = "Open dispersing billiard laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the parallel pipelines (0 = machine default).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Seed for randomized property-test sampling.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory for data files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct TableArg {
    /// Table description file (TOML).
    #[arg(long)]
    table: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Marked length spectrum up to a word length.
    Mls {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// Solve one periodic orbit and write its report.
    Orbit {
        #[command(flatten)]
        table: TableArg,
        #[arg(long)]
        word: String,
    },
    /// Temporal displacement, area, and the periodic-approximant sweep
    /// of the quadrilateral spanned by two periodic words.
    Quad {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value = "12")]
        word_a: String,
        #[arg(long, default_value = "13")]
        word_b: String,
        /// Holonomy series depth.
        #[arg(long, default_value_t = 60)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Two-table rigidity comparison.
    Compare {
        #[command(flatten)]
        table: TableArg,
        #[arg(long)]
        table_b: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        jet_order: usize,
    },
    /// Bowen-dimension sweep with a box-counting cross-check.
    Dimension {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Cylinder depth of the box-counting slice.
        #[arg(long, default_value_t = 9)]
        box_depth: usize,
    },
    /// Trace cover and gap list at a cylinder depth.
    Trace {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Perturb inside a certified gap and inside the cover, comparing
    /// spectrum changes.
    GapExperiment {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-3)]
        amplitude: f64,
        /// 1-based obstacle carrying the bump.
        #[arg(long, default_value_t = 1)]
        gap_obstacle: usize,
        /// Rank among that obstacle's gaps, widest first.
        #[arg(long, default_value_t = 0)]
        gap_rank: usize,
    },
    /// Run the invariant battery.
    Selftest {
        #[command(flatten)]
        table: TableArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let validation = matches!(
                err.downcast_ref::<Error>(),
                Some(
                    Error::InvalidConfig(_)
                        | Error::Io(_)
                        | Error::FewerThanThreeObstacles(_)
                        | Error::NonConvexShape { .. }
                        | Error::OverlappingObstacles(_, _)
                        | Error::EclipseViolated(_)
                        | Error::InadmissibleWord(_)
                        | Error::BadBumpSupport
                )
            ) || err.downcast_ref::<Error>().is_none();
            ExitCode::from(if validation { 1 } else { 2 })
        }
    }
}

fn load_table(path: &Path) -> anyhow::Result<Table> {
    let table = Table::load(path)?;
    let report = check_non_eclipse(&table);
    if !report.pass {
        // trapped-set pipelines assume the horseshoe structure
        return Err(Error::EclipseViolated(report.offending[0]).into());
    }
    Ok(table)
}

fn write(out_dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn f(x: f64) -> String {
    format!("{x:.12e}")
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Mls { table, max_len } => {
            let t = load_table(&table.table)?;
            let mls = marked_length_spectrum(&t, max_len);
            if !mls.failures.is_empty() {
                for (w, e) in &mls.failures {
                    eprintln!("solver failure for {w}: {e}");
                }
            }
            let mut csv = String::from("word,length,lyapunov,residual,prime,newton_tol\n");
            for e in &mls.entries {
                csv.push_str(&format!(
                    "{},{},{},{},{},1e-12\n",
                    e.word,
                    f(e.length),
                    f(e.lyapunov),
                    f(e.residual),
                    e.prime
                ));
            }
            write(&cli.out, "mls.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Orbit { table, word } => {
            let t = load_table(&table.table)?;
            let w = Word::parse(&word)?;
            let orbit = solve_periodic_orbit(&t, &w)?;
            let mut record = serde_json::to_value(&orbit)?;
            record["lyapunov"] = serde_json::json!(orbit.lyapunov_exponent()?);
            record["newton_tol"] = serde_json::json!(1e-12);
            write(&cli.out, &format!("orbit_{word}.json"), &serde_json::to_string_pretty(&record)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Quad { table, word_a, word_b, depth, n_max } => {
            let t = load_table(&table.table)?;
            let quad = Quadrilateral::from_periodic(&t, &Word::parse(&word_a)?, 0, &Word::parse(&word_b)?, 0)?;
            let h = temporal_displacement(&t, &quad, depth)?;
            let area = quadrilateral_area(&t, &quad, 2e-3)?;
            let mut sweep = Vec::new();
            let mut csv = String::from("n,bounces,orbit_length,approximant,abs_error_vs_H,series_depth\n");
            for n in 1..=n_max {
                let a = periodic_approx_displacement(&t, &quad, n)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    n,
                    a.bounces,
                    f(a.orbit_length),
                    f(a.approximant),
                    f((a.approximant - h.four_holonomy).abs()),
                    depth
                ));
                sweep.push(a);
            }
            let report = serde_json::json!({
                "corners": quad.corners,
                "displacement": h,
                "area": area,
                "area_plus_displacement": area.area + h.four_holonomy,
                "approximants": sweep,
            });
            write(&cli.out, "quad_report.json", &serde_json::to_string_pretty(&report)?)?;
            write(&cli.out, "quad_nsweep.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { table, table_b, max_len, tol, jet_order } => {
            let a = load_table(&table.table)?;
            let b = load_table(&table_b)?;
            let map = AlphabetMap::identity(a.len());
            let pairing = match_periodic_orbits(&a, &b, &map, max_len)?;
            let iso = iso_length_spectral_report(&pairing, tol);
            let consequences = conjugacy_consequence_report(&a, &b, &map, &pairing, jet_order, tol)?;
            let mut txt = String::new();
            txt.push_str(&format!(
                "verdict: {}\n",
                if iso.pass { "PASS" } else { "FAIL" }
            ));
            txt.push_str(&format!("pairs: {}  max |dL|: {}\n", pairing.rows.len(), f(iso.max_diff)));
            txt.push_str(&format!("tolerance: {}\n\n", f(tol)));
            txt.push_str("== consequence maxima ==\n");
            txt.push_str(&format!("max |r2 - r1|: {}\n", f(consequences.max_r_diff)));
            txt.push_str(&format!("max |tau2 - tau1|: {}\n", f(consequences.max_tau_diff)));
            for (k, v) in consequences.max_jet_diff.iter().enumerate() {
                txt.push_str(&format!("max |K^({k}) mismatch|: {}\n", f(*v)));
            }
            txt.push_str(&format!("max |angle mismatch|: {}\n", f(consequences.max_angle_diff)));
            txt.push_str(&format!(
                "max |DPsi - id| at scale ~1e-4: {}\n",
                f(consequences.max_derivative_distance)
            ));
            if consequences.gated {
                txt.push_str("\nnote: consequence data gated, iso-spectrality failed upstream\n");
            }
            txt.push_str("\n== dimension estimates ==\n");
            let n_dim = max_len.min(6).max(2);
            let da = bowen_dimension(&a, n_dim)?;
            let db = bowen_dimension(&b, n_dim)?;
            txt.push_str(&format!(
                "table A: delta_u {} delta_s {} (n = {n_dim})\n",
                f(da.delta_u),
                f(da.delta_s)
            ));
            txt.push_str(&format!(
                "table B: delta_u {} delta_s {} (n = {n_dim})\n",
                f(db.delta_u),
                f(db.delta_s)
            ));
            txt.push_str(&format!("|delta_u(A) - delta_u(B)|: {}\n", f((da.delta_u - db.delta_u).abs())));
            write(&cli.out, "compare_report.txt", &txt)?;
            let mut csv = String::from("word,word_b,length_a,length_b,abs_diff,newton_tol\n");
            for r in &pairing.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},1e-12\n",
                    r.word,
                    r.word_b,
                    f(r.length_a),
                    f(r.length_b),
                    f(r.diff)
                ));
            }
            write(&cli.out, "pairing.csv", &csv)?;
            let mut csv =
                String::from("word,bounce,s1,r1,s2,r2,r_diff,tau_diff,jet0_diff,angle_diff\n");
            for m in &consequences.bounces {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    m.word,
                    m.index,
                    f(m.s1),
                    f(m.r1),
                    f(m.s2),
                    f(m.r2),
                    f(m.r_diff),
                    f(m.tau_diff),
                    f(m.jet_diffs[0]),
                    f(m.angle_diff)
                ));
            }
            write(&cli.out, "consequences.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dimension { table, n_max, box_depth } => {
            let t = load_table(&table.table)?;
            let box_dim = box_counting_stable_slice(&t, &Word::parse("12")?, 0, box_depth)?;
            let mut csv =
                String::from("n,delta_u,delta_s,periodic_points,root_residual,box_dimension\n");
            for n in 2..=n_max {
                let est = bowen_dimension(&t, n)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    n,
                    f(est.delta_u),
                    f(est.delta_s),
                    est.orbit_count,
                    f(est.root_residual),
                    f(box_dim)
                ));
            }
            write(&cli.out, "dimension.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { table, depth } => {
            let t = load_table(&table.table)?;
            let cover = trace_cover(&t, depth)?;
            let mut csv = String::from("obstacle,left,right,depth,contraction\n");
            for (k, list) in cover.intervals.iter().enumerate() {
                for (a, b) in list {
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        k + 1,
                        f(*a),
                        f(*b),
                        depth,
                        f(cover.contraction)
                    ));
                }
            }
            write(&cli.out, "trace_cover.csv", &csv)?;
            let mut csv = String::from("obstacle,left,right,width\n");
            for (k, list) in cover.gaps.iter().enumerate() {
                for (a, b) in list {
                    csv.push_str(&format!("{},{},{},{}\n", k + 1, f(*a), f(*b), f(b - a)));
                }
            }
            write(&cli.out, "trace_gaps.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GapExperiment { table, depth, max_len, amplitude, gap_obstacle, gap_rank } => {
            let t = load_table(&table.table)?;
            if gap_obstacle == 0 || gap_obstacle > t.len() {
                return Err(Error::InvalidConfig("gap obstacle out of range".into()).into());
            }
            let report = gap_perturbation_experiment(
                &t,
                GapChoice { obstacle: gap_obstacle - 1, rank: gap_rank },
                amplitude,
                max_len,
                depth,
            )?;
            write(&cli.out, "gap_experiment.json", &serde_json::to_string_pretty(&report)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { table, samples } => {
            let t = load_table(&table.table)?;
            let report = billiards_core::selftest::run(&t, samples, cli.seed)?;
            for c in &report.checks {
                println!(
                    "{} {:<42} measured {:.3e}  tolerance {:.3e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance
                );
            }
            if report.pass() {
                println!("selftest: all {} checks passed", report.checks.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("selftest: FAILURES present");
                Ok(ExitCode::from(3))
            }
        }
    }
}
