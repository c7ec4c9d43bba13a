use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use warpcone::cat::{cat_test, hypothesis_audit, CatReport};
use warpcone::cone::{distance_oracle, solve, ConePoint, ConeSpace, Fiber, SampleOptions};
use warpcone::error::{Error, Result};
use warpcone::filling::{
    check_descriptors, local_convexity_probe, ConditionBOptions, ManifoldDescriptor, ProbeOptions, SubspaceDescriptor,
};
use warpcone::glue::{seam_isometry_check, SeamReport};
use warpcone::io::{from_tagged_json, to_tagged_json, ConeDoc, GluedDoc, WarpingDoc};
use warpcone::warp::{check_fk_convex_ae, check_fk_convex_barrier, synthesize_with, Profile, Warping, TAIL};

#[derive(Parser)]
#[command(name = "warpcone", version, about = "Warped cones over circle fibers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    LinearDerivative,
    Smooth,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a cone warping function and certify its curvature bound.
    Synth {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "linear-derivative")]
        profile: ProfileArg,
        /// Warping document; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a cone document over a circle of this length.
        #[arg(long, requires = "cone_out")]
        fiber_length: Option<f64>,
        #[arg(long, requires = "fiber_length")]
        cone_out: Option<PathBuf>,
        /// Upper level of the written cone; defaults to b + 1.
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Shortest path between two points of a cone.
    Geodesic {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: ConePoint,
        #[arg(long, value_parser = parse_point)]
        to: ConePoint,
        /// Also run the mesh oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_parser = parse_resolution, default_value = "400,800")]
        resolution: (usize, usize),
        /// Polyline CSV with header t,theta,s.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled CAT(K) comparison test.
    Cat {
        #[arg(long)]
        cone: PathBuf,
        /// Curvature to test, or `auto` for the certified bound.
        #[arg(long = "K", default_value = "auto", allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 200)]
        triangles: usize,
        #[arg(long, default_value_t = 3)]
        points_per_side: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV of the worst comparisons.
        #[arg(long)]
        worst: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditions A and B for a manifold and optional subspace.
    Check {
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        subspace: Option<PathBuf>,
        /// Largest admissible grid spacing; defaults to b'/100.
        #[arg(long)]
        max_spacing: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the solver with the mesh oracle.
    Oracle {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: ConePoint,
        #[arg(long, value_parser = parse_point)]
        to: ConePoint,
        #[arg(long, value_parser = parse_resolution, default_value = "400,800")]
        resolution: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare cone and collar distances in the gluing band.
    Seam {
        #[arg(long)]
        glued: PathBuf,
        /// Only this boundary component; all when absent.
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled local convexity of Y in one cone.
    Probe {
        #[arg(long)]
        glued: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ProbeOptions::default().tip_share)]
        tip_share: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> std::result::Result<ConePoint, String> {
    let (t, theta) = s.split_once(',').ok_or("expected t,theta")?;
    let t: f64 = t.trim().parse().map_err(|e| format!("t: {e}"))?;
    let theta: f64 = theta.trim().parse().map_err(|e| format!("theta: {e}"))?;
    Ok(ConePoint::new(t, theta))
}

fn parse_resolution(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n_t,n_theta")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    from_tagged_json(&std::fs::read_to_string(path)?)
}

fn read_cone(path: &Path) -> Result<ConeSpace> {
    read::<ConeDoc>(path)?.to_cone()
}

fn emit<T: Serialize>(out: Option<&Path>, doc: &T) -> Result<()> {
    let text = to_tagged_json(doc)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleSummary {
    length: f64,
    resolution: (usize, usize),
    relative_difference: f64,
}

#[derive(Serialize)]
struct GeodesicSummary {
    from: ConePoint,
    to: ConePoint,
    length: f64,
    through_tip: bool,
    clairaut_constant: Option<f64>,
    min_depth: f64,
    flagged: bool,
    oracle: Option<OracleSummary>,
}

#[derive(Serialize)]
struct SeamSummary {
    reports: Vec<SeamReport>,
    pass: bool,
}

/// Exit status: 0 success, 1 a check failed.
fn status(pass: bool) -> u8 {
    if pass { 0 } else { 1 }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Synth { b, delta, profile, out, fiber_length, cone_out, t_max } => {
            let profile = match profile {
                ProfileArg::LinearDerivative => Profile::LinearDerivative,
                ProfileArg::Smooth => Profile::Smooth,
            };
            let f = synthesize_with(b, delta, profile)?;
            let ae = check_fk_convex_ae(&f, f.k(), 10_000);
            let barrier = check_fk_convex_barrier(&f, f.k(), &[(f.t0(), f.b()), (f.b(), f.b() + TAIL)])?;
            eprintln!(
                "t0 = {:.12}, mu = {:.12}, K = {:.12}, a.e. certificate {}, barrier certificate {}",
                f.t0(),
                f.mu(),
                f.k(),
                if ae.pass { "pass" } else { "FAIL" },
                if barrier.pass { "pass" } else { "FAIL" }
            );
            let warping = Warping::Cone(f);
            emit(out.as_deref(), &WarpingDoc::from(&warping))?;
            if let (Some(length), Some(path)) = (fiber_length, cone_out) {
                let top = t_max.unwrap_or(b + 1.0);
                let cone = ConeSpace::new(warping, Fiber::circle(length)?, top)?;
                emit(Some(&path), &ConeDoc::from(&cone))?;
            }
            Ok(status(ae.pass && barrier.pass))
        }
        Command::Geodesic { cone, from, to, oracle, resolution, csv, out } => {
            let cone = read_cone(&cone)?;
            let sol = solve(&cone, from, to)?;
            if let Some(path) = csv {
                std::fs::write(path, sol.sample(&cone, SampleOptions::default()).to_csv())?;
            }
            let oracle = if oracle {
                let length = distance_oracle(&cone, from, to, resolution)?;
                let relative_difference = if sol.length > 0.0 { (length - sol.length).abs() / sol.length } else { length };
                Some(OracleSummary { length, resolution, relative_difference })
            } else {
                None
            };
            let flagged = sol.flagged;
            emit(
                out.as_deref(),
                &GeodesicSummary {
                    from: sol.from,
                    to: sol.to,
                    length: sol.length,
                    through_tip: sol.through_tip,
                    clairaut_constant: sol.clairaut_constant,
                    min_depth: sol.min_depth,
                    flagged,
                    oracle,
                },
            )?;
            if flagged {
                eprintln!("warning: shooting did not match the fiber displacement to tolerance");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Oracle { cone, from, to, resolution, out } => {
            let cone = read_cone(&cone)?;
            let sol = solve(&cone, from, to)?;
            let length = distance_oracle(&cone, from, to, resolution)?;
            let relative_difference = if sol.length > 0.0 { (length - sol.length).abs() / sol.length } else { length };
            #[derive(Serialize)]
            struct Comparison {
                solver: f64,
                oracle: OracleSummary,
            }
            emit(out.as_deref(), &Comparison { solver: sol.length, oracle: OracleSummary { length, resolution, relative_difference } })?;
            Ok(0)
        }
        Command::Cat { cone, k, triangles, points_per_side, seed, worst, out } => {
            let cone = read_cone(&cone)?;
            let audit = hypothesis_audit(&cone);
            let k = if k == "auto" {
                audit.certified_k
            } else {
                k.parse().map_err(|_| Error::InvalidDescriptor(format!("--K expects a number or auto, got {k}")))?
            };
            if !audit.pass {
                eprintln!("warning: the cone does not meet the warped-product CAT(K) hypotheses");
            }
            let report: CatReport = cat_test(&cone, k, triangles, points_per_side, seed)?;
            if let Some(path) = worst {
                std::fs::write(path, report.offenders_csv())?;
            }
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            emit(out.as_deref(), &report)?;
            Ok(status(report.pass))
        }
        Command::Check { manifold, subspace, max_spacing, out } => {
            let m: ManifoldDescriptor = read(&manifold)?;
            let s: Option<SubspaceDescriptor> = subspace.as_deref().map(read).transpose()?;
            let report = check_descriptors(&m, s.as_ref(), ConditionBOptions { max_spacing })?;
            emit(out.as_deref(), &report)?;
            Ok(status(report.pass))
        }
        Command::Seam { glued, component, pairs, seed, out } => {
            let g = read::<GluedDoc>(&glued)?.to_glued()?;
            let components: Vec<usize> = match component {
                Some(i) => vec![i],
                None => (0..g.cones().len()).collect(),
            };
            let reports = components
                .into_iter()
                .map(|i| seam_isometry_check(&g, i, pairs, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            let pass = reports.iter().all(|r| r.pass);
            emit(out.as_deref(), &SeamSummary { reports, pass })?;
            Ok(status(pass))
        }
        Command::Probe { glued, subspace, component, pairs, seed, tip_share, out } => {
            let g = read::<GluedDoc>(&glued)?.to_glued()?;
            let s: SubspaceDescriptor = read(&subspace)?;
            s.validate(g.manifold())?;
            let opts = ProbeOptions { tip_share, ..ProbeOptions::default() };
            let report = local_convexity_probe(g.cone(component)?, &s, component, pairs, seed, opts)?;
            emit(out.as_deref(), &report)?;
            Ok(status(report.pass))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
