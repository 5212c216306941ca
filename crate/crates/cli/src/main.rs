//! `foldrep`: build, fold and certify surface-group representations.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use foldrep::domination::{certify, dominating_fuchsian, strictly_dominated_fold, DominationCertificate, Verdict, WordBudget};
use foldrep::folding::{fold_surface, prescribe_labeling};
use foldrep::io;
use foldrep::pants::{
    boundary_lengths, build_pants_rep, classify_pants_rep, fold_pants, normal_form, unfold_pants, BoundaryLengths, Branch,
    PantsRep,
};
use foldrep::surface::{assemble_fuchsian, euler_class_surface};
use foldrep::univcover::euler_class_pants;

#[derive(Parser)]
#[command(name = "foldrep", version, about = "Fuchsian and folded surface-group representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair-of-pants representations.
    #[command(subcommand)]
    Pants(PantsCommand),
    /// Surfaces glued from pants.
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// Euler class of a surface representation dump.
    Euler {
        #[arg(long)]
        rep: PathBuf,
        /// `additive` sums over pants, `commutator` lifts a standard
        /// generating set to the universal cover.
        #[arg(long, default_value = "additive")]
        method: String,
    },
    /// Fold a Fuchsian assembly along a labeling.
    Fold {
        #[arg(long)]
        surface: PathBuf,
        /// Labeling JSON `{"labels": {pantsId: -1|0|1}}`.
        #[arg(long, conflicts_with = "euler")]
        labels: Option<PathBuf>,
        /// Prescribed Euler class, labeled greedily.
        #[arg(long, allow_negative_numbers = true)]
        euler: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the Fuchsian representation.
        #[arg(long)]
        fuchsian_out: Option<PathBuf>,
    },
    /// Domination certificates.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Length spectrum ratios of two dumps as CSV.
    Spectrum {
        #[arg(long)]
        j: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        max_word_len: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cuff axes of a representation in the Poincaré disk, as SVG.
    AxesSvg {
        #[arg(long)]
        rep: PathBuf,
        /// Conjugate each cuff axis by generator words up to this length.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PantsCommand {
    /// Normal-form pants rep with given boundary lengths.
    Build {
        /// Boundary lengths `a,b,c`.
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: i8,
        #[arg(long, default_value = "generic")]
        branch: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Classify {
        #[arg(long)]
        rep: PathBuf,
    },
    /// The nongeometric rep with the same boundary lengths.
    Fold {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The geometric rep with the same boundary lengths.
    Unfold {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SurfaceCommand {
    /// Fuchsian holonomy from Fenchel–Nielsen coordinates.
    Assemble {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CertifyOutput {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_word_len: u64,
    /// Certificate JSON destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-word spectrum CSV destination.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// Fuchsian rep strictly dominating a fold of its shrunk assembly.
    Fold {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        euler: i64,
        #[arg(long, value_parser = deformation)]
        shrink: f64,
        #[command(flatten)]
        output: CertifyOutput,
    },
    /// Fold strictly dominated by the lengthened Fuchsian assembly.
    UnfoldDirection {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, value_parser = deformation)]
        lengthen: f64,
        #[command(flatten)]
        output: CertifyOutput,
    },
}

fn deformation(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..1.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("{t} is outside [0, 1)"))
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(v: &Value, out: Option<&Path>) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?, out)
}

fn pants_report(rep: &PantsRep) -> Result<Value> {
    let mut v = io::pants_to_json(rep);
    v["class"] = json!(classify_pants_rep(rep)?.to_string());
    v["eulerClass"] = json!(euler_class_pants(rep)?);
    Ok(v)
}

fn finish_certificate(cert: &DominationCertificate, output: &CertifyOutput) -> Result<ExitCode> {
    emit(&cert.to_json(), output.out.as_deref())?;
    if let Some(p) = &output.csv {
        fs::write(p, cert.spectrum.to_csv()).with_context(|| format!("writing {}", p.display()))?;
    }
    if output.out.is_some() {
        println!("{} sup ratio {} at {}", cert.verdict, cert.sup_ratio, cert.witness);
    }
    Ok(match cert.verdict {
        Verdict::StrictlyDominated => ExitCode::SUCCESS,
        Verdict::NotCertified => ExitCode::from(1),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Pants(cmd) => match cmd {
            PantsCommand::Build { lengths, epsilon, branch, out } => {
                let [a, b, c] = lengths[..] else {
                    bail!("--lengths takes exactly three values");
                };
                let l = BoundaryLengths::new(a, b, c)?;
                let rep = build_pants_rep(&l, epsilon, branch.parse::<Branch>()?)?;
                emit_json(&pants_report(&rep)?, out.as_deref())?;
            }
            PantsCommand::Classify { rep } => {
                let rep = io::pants_from_json(&read_json(&rep)?)?;
                let l = boundary_lengths(&rep)?;
                let nf = normal_form(&rep)?;
                let mut v = json!({
                    "class": classify_pants_rep(&rep)?.to_string(),
                    "eulerClass": euler_class_pants(&rep)?,
                    "lengths": [io::number(l.a), io::number(l.b), io::number(l.c)],
                    "epsilon": nf.epsilon,
                    "branch": nf.branch.to_string(),
                });
                v["nu"] = io::number(nf.nu);
                emit_json(&v, None)?;
            }
            PantsCommand::Fold { rep, out } => {
                let rep = fold_pants(&io::pants_from_json(&read_json(&rep)?)?)?;
                emit_json(&pants_report(&rep)?, out.as_deref())?;
            }
            PantsCommand::Unfold { rep, out } => {
                let rep = unfold_pants(&io::pants_from_json(&read_json(&rep)?)?)?;
                emit_json(&pants_report(&rep)?, out.as_deref())?;
            }
        },
        Command::Surface(SurfaceCommand::Assemble { surface, out }) => {
            let (pd, fnc) = io::surface_from_json(&read_json(&surface)?)?;
            emit_json(&io::rep_to_json(&assemble_fuchsian(&pd, &fnc)?), out.as_deref())?;
        }
        Command::Euler { rep, method } => {
            let rep = io::rep_from_json(&read_json(&rep)?)?;
            let eu = match method.as_str() {
                "additive" => euler_class_surface(&rep)?,
                "commutator" => rep.euler_class_commutator()?,
                other => bail!("unknown method {other}"),
            };
            println!("{eu}");
        }
        Command::Fold { surface, labels, euler, out, fuchsian_out } => {
            let (pd, fnc) = io::surface_from_json(&read_json(&surface)?)?;
            let labels = match (labels, euler) {
                (Some(p), _) => io::labeling_from_json(&read_json(&p)?, &pd)?,
                (None, Some(k)) => prescribe_labeling(&pd, k)?,
                (None, None) => bail!("one of --labels or --euler is required"),
            };
            let (j, rho) = fold_surface(&pd, &fnc, &labels)?;
            if let Some(p) = fuchsian_out {
                emit_json(&io::rep_to_json(&j), Some(&p))?;
            }
            emit_json(&io::rep_to_json(&rho), out.as_deref())?;
        }
        Command::Certify(cmd) => {
            return match cmd {
                CertifyCommand::Fold { surface, euler, shrink, output } => {
                    let (pd, fnc) = io::surface_from_json(&read_json(&surface)?)?;
                    let budget = WordBudget::new(output.max_word_len as usize);
                    finish_certificate(&strictly_dominated_fold(&pd, &fnc, euler, shrink, budget)?, &output)
                }
                CertifyCommand::UnfoldDirection { surface, labels, lengthen, output } => {
                    let (pd, fnc) = io::surface_from_json(&read_json(&surface)?)?;
                    let labels = io::labeling_from_json(&read_json(&labels)?, &pd)?;
                    let budget = WordBudget::new(output.max_word_len as usize);
                    finish_certificate(&dominating_fuchsian(&pd, &fnc, &labels, lengthen, budget)?, &output)
                }
            };
        }
        Command::Spectrum { j, rho, max_word_len, out } => {
            let j = io::rep_from_json(&read_json(&j)?)?;
            let rho = io::rep_from_json(&read_json(&rho)?)?;
            let cert = certify(&j, &rho, 0.0, WordBudget::new(max_word_len as usize))?;
            match out {
                Some(p) => fs::write(&p, cert.spectrum.to_csv()).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{}", cert.spectrum.to_csv()),
            }
        }
        Command::AxesSvg { rep, depth, out } => {
            let rep = io::rep_from_json(&read_json(&rep)?)?;
            emit(&svg::cuff_axes(&rep, depth)?, out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
