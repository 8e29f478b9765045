use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use jtwo::chart::{self, ColorMode};
use jtwo::detection::{self, Verdict};
use jtwo::fixtures::{check_j2, FIG_J2_MAX};
use jtwo::graded::GradedGroup;
use jtwo::j2::{verify_periodicity_lift, ExtVerdict, J2Model};
use jtwo::moore::{mod_power, mod_v1j};
use jtwo::psi::{default_rules, tmf_psi};
use jtwo::tmf::{load_tmf, TmfData};
use jtwo::{verify, Error};

#[derive(Parser)]
#[command(name = "jtwo", version, about = "Homotopy of the height-2 image-of-J spectrum j² at p = 3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 600)]
    max_degree: i64,
    /// Data file; falls back to $JTWO_DATA, then the bundled table.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Quotient ideal: 3, 9, 27 or 3,v1^j.
    #[arg(long, global = true, default_value = "3")]
    ideal: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    Compute {
        #[arg(value_enum)]
        what: ComputeWhat,
    },
    Check {
        #[arg(value_enum)]
        what: CheckWhat,
        /// Product-check file for `check products`.
        file: Option<PathBuf>,
    },
    Verify {
        #[arg(value_enum)]
        what: VerifyWhat,
    },
    Emit {
        #[arg(value_enum)]
        what: EmitWhat,
        /// Stem window `LO..HI`, inclusive.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, value_enum, default_value_t = Color::Provenance)]
        color: Color,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComputeWhat {
    Tmf,
    TmfPsi,
    J2,
    Quotient,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckWhat {
    Hurewicz,
    Products,
    Periodicity,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitWhat {
    Chart,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Tsv,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum Color {
    Provenance,
    Hurewicz,
}

/// Outcome of a command: output text, and whether a check failed.
struct Outcome {
    text: String,
    failed: bool,
    warnings: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, failed: false, warnings: Vec::new() }
    }
}

enum Fail {
    Usage(String),
    Check(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::FixtureMismatch { .. } | Error::Seam(..) | Error::Check(_) => Fail::Check(e.to_string()),
            other => Fail::Usage(other.to_string()),
        }
    }
}

fn render_group(g: &GradedGroup, lo: i64, hi: i64, format: Format, title: &str, detected: &BTreeSet<jtwo::label::Label>, mode: ColorMode) -> String {
    let e = chart::entries(g, lo, hi, mode, detected);
    match format {
        Format::Tsv => chart::to_tsv(&e),
        Format::Svg => chart::to_svg(&e),
        Format::Md => chart::to_markdown(title, &e),
    }
}

fn parse_window(w: &str, max: i64) -> Result<(i64, i64), Fail> {
    let (a, b) = w.split_once("..").ok_or_else(|| Fail::Usage(format!("window `{w}` is not LO..HI")))?;
    let lo: i64 = a.trim().parse().map_err(|_| Fail::Usage(format!("bad window start `{a}`")))?;
    let hi: i64 = b.trim().parse().map_err(|_| Fail::Usage(format!("bad window end `{b}`")))?;
    if hi > max {
        return Err(Fail::Usage(format!("window end {hi} exceeds max degree {max}")));
    }
    Ok((lo, hi))
}

fn quotient(model: &J2Model, ideal: &str) -> Result<GradedGroup, Fail> {
    let ideal: String = ideal.chars().filter(|c| !c.is_whitespace()).collect();
    match ideal.as_str() {
        "3" => Ok(mod_power(&model.group, 1, |s| s.filtration)?),
        "9" => Ok(mod_power(&model.group, 2, |s| s.filtration)?),
        "27" => Ok(mod_power(&model.group, 3, |s| s.filtration)?),
        other => {
            let j = other
                .strip_prefix("3,v1^")
                .or_else(|| (other == "3,v1").then_some("1"))
                .and_then(|j| j.parse::<u32>().ok())
                .filter(|j| *j >= 1)
                .ok_or_else(|| Fail::Usage(format!("unknown ideal `{other}`")))?;
            Ok(mod_v1j(&model.mod3.group, &model.mod3.v1, j)?)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Fail> {
    let data = TmfData::resolve(cli.data.as_deref())?;
    let max = cli.max_degree;
    if max < 0 {
        return Err(Fail::Usage("--max-degree must be nonnegative".into()));
    }
    let none = BTreeSet::new();
    match &cli.command {
        Command::Compute { what } => match what {
            ComputeWhat::Tmf => {
                let t = load_tmf(max, &data)?;
                Ok(Outcome::ok(render_group(&t.group, 0, max, cli.format, "π*tmf", &none, ColorMode::Provenance)))
            }
            ComputeWhat::TmfPsi => {
                let t = load_tmf(max + 1, &data)?;
                let p = tmf_psi(&t, &default_rules())?;
                let text = render_group(&p.group, 0, max, cli.format, "π*tmf^ψ", &none, ColorMode::Provenance);
                Ok(Outcome { text, failed: false, warnings: p.warnings })
            }
            ComputeWhat::J2 => {
                let m = J2Model::build(max, &data)?;
                if max >= FIG_J2_MAX {
                    check_j2(&m)?;
                }
                let text = render_group(&m.group, 0, max, cli.format, "π*j²", &none, ColorMode::Provenance);
                Ok(Outcome { text, failed: false, warnings: m.warnings.clone() })
            }
            ComputeWhat::Quotient => {
                let m = J2Model::build(max, &data)?;
                let g = quotient(&m, &cli.ideal)?;
                let title = format!("π*j²/({})", cli.ideal);
                Ok(Outcome::ok(render_group(&g, 0, max, cli.format, &title, &none, ColorMode::Provenance)))
            }
        },
        Command::Check { what, file } => match what {
            CheckWhat::Hurewicz => {
                let m = J2Model::build(max, &data)?;
                let recs = detection::hurewicz_image(&m, max)?;
                let unlicensed = detection::unlicensed_detections(&recs, max);
                let mut text = detection_text(&recs);
                for r in &unlicensed {
                    let _ = writeln!(text, "unlicensed detection in degree {}: {}", r.degree, r.element);
                }
                Ok(Outcome { text, failed: !unlicensed.is_empty(), warnings: m.warnings.clone() })
            }
            CheckWhat::Products => {
                let m = J2Model::build(max + 8, &data)?;
                match file {
                    None => {
                        let recs = detection::theorem_b(&m, max)?;
                        let failed = recs.iter().any(|r| !r.verdict.is_nonzero());
                        Ok(Outcome { text: chart::product_report(&recs), failed, warnings: m.warnings.clone() })
                    }
                    Some(path) => {
                        let text = std::fs::read_to_string(path).map_err(Error::from)?;
                        let mut out = String::from("| product | expected | verdict | ok |\n|---|---|---|---|\n");
                        let mut failed = false;
                        for e in detection::parse_product_file(&text)? {
                            let v = detection::check_product(&m, &e.word)?;
                            let ok = e.accepts(&v);
                            failed |= !ok;
                            let _ = writeln!(out, "| {} | {} | {v} | {} |", e.word, e.expected, if ok { "yes" } else { "NO" });
                        }
                        Ok(Outcome { text: out, failed, warnings: m.warnings.clone() })
                    }
                }
            }
            CheckWhat::Periodicity => {
                let m = J2Model::build(max.max(164), &data)?;
                let mut text = String::new();
                let mut failed = false;
                for s in verify_periodicity_lift(&m)? {
                    failed |= !s.passed;
                    let _ = writeln!(text, "{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
                }
                let bad = detection::periodicity_check((max / 144).max(1) as u32);
                failed |= !bad.is_empty();
                let _ = writeln!(text, "{} detectors shift by Δ⁶: {}", if bad.is_empty() { "PASS" } else { "FAIL" }, bad.join("; "));
                for a in &m.audits {
                    failed |= a.verdict != ExtVerdict::Split;
                    let _ = writeln!(
                        text,
                        "extension at {}: {:?} (fibre {}, split {}, nonsplit {})",
                        a.degree, a.verdict, a.fibre_dim, a.split_dim, a.nonsplit_dim
                    );
                }
                Ok(Outcome { text, failed, warnings: m.warnings.clone() })
            }
        },
        Command::Verify { what: VerifyWhat::Paper } => {
            let checks = verify::run(max, &data)?;
            let failed = checks.iter().any(|c| !c.passed);
            Ok(Outcome { text: verify::render(&checks), failed, warnings: Vec::new() })
        }
        Command::Emit { what: EmitWhat::Chart, window, color } => {
            let (lo, hi) = match window {
                Some(w) => parse_window(w, max)?,
                None => (0, max),
            };
            let m = J2Model::build(max, &data)?;
            let (mode, detected) = match color {
                Color::Provenance => (ColorMode::Provenance, BTreeSet::new()),
                Color::Hurewicz => {
                    let recs = detection::hurewicz_image(&m, max)?;
                    (ColorMode::Hurewicz, detection::detected_labels(&recs))
                }
            };
            let g: Arc<GradedGroup> = m.group.clone();
            let title = format!("π*j², stems {lo} to {hi}");
            Ok(Outcome { text: render_group(&g, lo, hi, cli.format, &title, &detected, mode), failed: false, warnings: m.warnings.clone() })
        }
    }
}

fn detection_text(recs: &[detection::DetectionRecord]) -> String {
    let mut s = chart::detection_report(recs);
    let detected = recs.iter().filter(|r| matches!(r.verdict, Verdict::DetectedBy { .. })).count();
    let _ = writeln!(s, "\n{detected} detected, {} records", recs.len());
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Fail::Check(msg)) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &outcome.text),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.failed || (cli.strict && !outcome.warnings.is_empty()) {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
