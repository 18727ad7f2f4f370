use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use logperiod::blowup::{integral_invariance_check, make_proper, DEFAULT_CAP};
use logperiod::complexint::{annulus_slice_decay, integrate_admissible, AnnulusVariant, ComplexLogForm};
use logperiod::integrate::{
    default_decay_params, integrate_log_form, pushforward_bound_check, slice_decay_report, BoundVerdict, DecayReport,
    DecayVerdict, QuadConfig,
};
use logperiod::polyform::{parse_log_form, parse_poly, Polynomial};
use logperiod::region::{
    fiber_finiteness_probe, is_admissible, is_allowable, FiberReport, ProbeConfig, Region, RegionDocument, RegionKind,
    Verdict,
};
use logperiod::stokes::{check_stokes, parse_smooth_form, stokes_corpus, SimplexMap};

const STOKES_TOLERANCE: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "logperiod",
    version,
    about = "Allowability checks and singular integrals of logarithmic forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Quad {
    /// First excision radius.
    #[arg(long)]
    eps0: Option<f64>,
    /// Number of ladder rungs.
    #[arg(long)]
    ladder: Option<usize>,
    /// Ratio between consecutive rungs.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per rung above the Monte-Carlo threshold.
    #[arg(long = "mc-budget")]
    mc_budget: Option<usize>,
    /// Subinterval budget of the outermost quadrature rule.
    #[arg(long)]
    nodes: Option<usize>,
    /// Write the ladder (or decay points) as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Quad {
    fn config(&self) -> Result<QuadConfig> {
        let mut cfg = QuadConfig::default();
        if let Some(v) = self.eps0 {
            cfg.eps0 = v;
        }
        if let Some(v) = self.ladder {
            cfg.ladder_len = v;
        }
        if let Some(v) = self.ratio {
            cfg.ratio = v;
        }
        if let Some(v) = self.mc_budget {
            cfg.mc_samples = v;
        }
        if let Some(v) = self.nodes {
            cfg.outer_intervals = v;
        }
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    fn probe(&self) -> ProbeConfig {
        ProbeConfig {
            seed: self.seed,
            ..ProbeConfig::default()
        }
    }

    fn write(&self, csv: &str) -> Result<()> {
        if let Some(path) = &self.out {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Variant {
    Dominated,
    Circle,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Allowability of a real region, or m-admissibility of a complex one.
    Check {
        region: PathBuf,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate a top-degree logarithmic form over a real region.
    Integrate {
        region: PathBuf,
        #[arg(long)]
        form: Option<String>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Integrate a complex logarithmic form over an admissible region.
    IntegrateComplex {
        region: PathBuf,
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        m: Option<i64>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Blow up faces until the witness polynomial meets them properly.
    Blowup {
        region: PathBuf,
        #[arg(long)]
        witness: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Also compare the integral with the sum over the leaf charts.
        #[arg(long)]
        form: Option<String>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Decay of slice integrals along a monomial.
    Decay {
        region: PathBuf,
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        u: String,
        #[command(flatten)]
        quad: Quad,
    },
    /// Decay of slice integrals `|z1| = t` of a complex form.
    DecayComplex {
        region: PathBuf,
        #[arg(long)]
        form: Option<String>,
        #[arg(long, value_enum, default_value_t = Variant::Dominated)]
        variant: Variant,
        #[command(flatten)]
        quad: Quad,
    },
    /// Stokes residuals on the simplex, for the built-in corpus or one map.
    Stokes {
        /// Map components separated by `;`, in x1..xm.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        form: Option<String>,
        /// Simplex dimension.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Pushforward volume bound for `a·df1∧…∧dfn`.
    BoundCheck {
        region: PathBuf,
        /// Map components separated by `;`.
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "1")]
        coeff: String,
        #[command(flatten)]
        quad: Quad,
    },
    /// Sampled fiber cardinalities along one axis.
    ProbeFibers {
        region: PathBuf,
        /// 1-based coordinate index.
        #[arg(long, default_value_t = 1)]
        axis: usize,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<RegionDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RegionDocument::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn form_text(flag: &Option<String>, doc: &RegionDocument) -> Result<String> {
    flag.clone()
        .or_else(|| doc.form.clone())
        .ok_or_else(|| anyhow!("no form given (use --form)"))
}

fn polys(text: &str, region: &Region) -> Result<Vec<Polynomial>> {
    let vars = region.variables();
    text.split(';').map(|s| Ok(parse_poly(s.trim(), &vars)?)).collect()
}

fn verdict_line(v: &Verdict, condition: &str) -> String {
    match v {
        Verdict::Allowable { heuristic } => {
            format!(
                "{}{}",
                condition.to_uppercase(),
                if *heuristic { " [heuristic]" } else { "" }
            )
        }
        Verdict::Violated {
            face,
            dim,
            need,
            heuristic,
        } => format!(
            "NOT {}: violated at face {face} (dimension {dim}, {need}){}",
            condition.to_uppercase(),
            if *heuristic { " [heuristic]" } else { "" }
        ),
    }
}

fn decay_exit(r: &DecayReport) -> u8 {
    match r.verdict {
        DecayVerdict::Decaying { .. } | DecayVerdict::IdenticallyZero => 0,
        DecayVerdict::NoDecay { .. } => 2,
    }
}

fn decay_csv(r: &DecayReport) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in &r.points {
        s.push_str(&format!("{t:e},{v:e}\n"));
    }
    s
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Check { region, m, seed } => {
            let doc = load(&region)?;
            let probe = ProbeConfig {
                seed,
                ..ProbeConfig::default()
            };
            let v = match doc.region.kind() {
                RegionKind::Real => {
                    let v = is_allowable(&doc.region, &probe)?;
                    println!("{}", verdict_line(&v, "allowable"));
                    v
                }
                RegionKind::Complex => {
                    let m = m.or(doc.m).ok_or_else(|| anyhow!("complex regions need --m"))?;
                    let v = is_admissible(&doc.region, m, &probe)?;
                    println!("{}", verdict_line(&v, &format!("{m}-admissible")));
                    v
                }
            };
            Ok(if v.passed() { 0 } else { 2 })
        }
        Command::Integrate { region, form, quad } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let w = parse_log_form(&form_text(&form, &doc)?, a.n(), a.p())?;
            let r = integrate_log_form(a, &w, &quad.config()?)?;
            quad.write(&r.abs_ladder.to_csv())?;
            println!("{r}");
            Ok(if r.converged() { 0 } else { 2 })
        }
        Command::IntegrateComplex { region, form, m, quad } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let n = a.n() / 2;
            let w = ComplexLogForm::parse(&form_text(&form, &doc)?, n)?;
            let m = m.or(doc.m).unwrap_or(w.degree() as i64);
            let m = usize::try_from(m).map_err(|_| anyhow!("--m must be nonnegative"))?;
            let r = integrate_admissible(a, &w, m, &quad.config()?, &quad.probe())?;
            let mut csv = String::from("sectors,partition,re,im\n");
            for t in &r.tasks {
                let v = |x: &Option<logperiod::integrate::IntegralResult>| x.as_ref().map_or(0.0, |r| r.value);
                csv.push_str(&format!(
                    "{},{},{:e},{:e}\n",
                    t.sectors,
                    t.partition,
                    v(&t.re),
                    v(&t.im)
                ));
            }
            quad.write(&csv)?;
            println!("{r}");
            Ok(if r.converged { 0 } else { 2 })
        }
        Command::Blowup {
            region,
            witness,
            cap,
            form,
            quad,
        } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let f = parse_poly(&witness, &a.variables())?;
            let out = make_proper(&f, a.p(), cap)?;
            print!("{}", out.tower);
            for (chart, g) in &out.transforms {
                println!("chart {chart}: {}", g.fmt_with(a.variables().names()));
            }
            println!(
                "{}",
                if out.complete {
                    "PROPER"
                } else {
                    "INCOMPLETE (cap reached)"
                }
            );
            let mut code = if out.complete { 0 } else { 2 };
            if let Some(text) = form {
                let w = parse_log_form(&text, a.n(), a.p())?;
                let rep = integral_invariance_check(a, &w, &out.tower, &quad.config()?)?;
                println!("{rep}");
                if !rep.pass {
                    code = 2;
                }
            }
            Ok(code)
        }
        Command::Decay { region, form, u, quad } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let w = parse_log_form(&form_text(&form, &doc)?, a.n(), a.p())?;
            let mono = parse_poly(&u, &a.variables())?;
            let exps = match mono.terms().collect::<Vec<_>>().as_slice() {
                [(m, c)] if **c == num_rational_one() => m.exponents().to_vec(),
                _ => bail!("--u must be a monomial with coefficient 1"),
            };
            let r = slice_decay_report(a, &exps, &w, &default_decay_params(), &quad.config()?)?;
            quad.write(&decay_csv(&r))?;
            println!("{r}");
            Ok(decay_exit(&r))
        }
        Command::DecayComplex {
            region,
            form,
            variant,
            quad,
        } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let w = ComplexLogForm::parse(&form_text(&form, &doc)?, a.n() / 2)?;
            let variant = match variant {
                Variant::Dominated => AnnulusVariant::Dominated,
                Variant::Circle => AnnulusVariant::Circle,
            };
            let r = annulus_slice_decay(a, &w, &default_decay_params(), variant, &quad.config()?, &quad.probe())?;
            quad.write(&decay_csv(&r))?;
            println!("{r}");
            Ok(decay_exit(&r))
        }
        Command::Stokes { map, form, m, quad } => {
            let cfg = quad.config()?;
            let cases: Vec<(String, SimplexMap, _)> = match (map, form) {
                (Some(map), Some(form)) => {
                    let comps: Vec<&str> = map.split(';').map(str::trim).collect();
                    let m = m.ok_or_else(|| anyhow!("--m is required with --map"))?;
                    let h = SimplexMap::parse(m, &comps)?;
                    let psi = parse_smooth_form(&form, h.target_dim())?;
                    vec![("custom".to_string(), h, psi)]
                }
                (None, None) => stokes_corpus()?
                    .into_iter()
                    .map(|c| (c.name.to_string(), c.map, c.form))
                    .collect(),
                _ => bail!("--map and --form go together"),
            };
            let mut csv = String::from("case,boundary,interior,residual\n");
            let mut worst: f64 = 0.0;
            for (name, h, psi) in &cases {
                let rep = check_stokes(h, psi, &cfg)?;
                println!("{name}: {rep}");
                csv.push_str(&format!("{name},{:e},{:e},{:e}\n", rep.lhs, rep.rhs, rep.residual));
                worst = worst.max(rep.residual);
            }
            quad.write(&csv)?;
            if worst < STOKES_TOLERANCE {
                println!("PASS max residual {worst:.3e}");
                Ok(0)
            } else {
                println!("FAIL max residual {worst:.3e} exceeds {STOKES_TOLERANCE:e}");
                Ok(2)
            }
        }
        Command::BoundCheck {
            region,
            map,
            coeff,
            quad,
        } => {
            let doc = load(&region)?;
            let a = &doc.region;
            let f = polys(&map, a)?;
            let c = parse_poly(&coeff, &a.variables())?;
            let r = pushforward_bound_check(a, &f, &c, &quad.config()?)?;
            println!("{r}");
            Ok(match r.verdict {
                BoundVerdict::Pass => 0,
                _ => 2,
            })
        }
        Command::ProbeFibers {
            region,
            axis,
            samples,
            cap,
            seed,
        } => {
            let doc = load(&region)?;
            if axis == 0 || axis > doc.region.n() {
                bail!("axis {axis} out of range 1..={}", doc.region.n());
            }
            let r = fiber_finiteness_probe(&doc.region, axis - 1, samples, cap, seed)?;
            println!("{r}");
            Ok(match r {
                FiberReport::Finite { .. } => 0,
                FiberReport::InfiniteWitnessed { .. } => 2,
            })
        }
    }
}

fn num_rational_one() -> logperiod::polyform::Rational {
    logperiod::polyform::rat_int(1)
}

/// Parse `argv` (program name first) and run; returns the exit code.
fn run<I: IntoIterator<Item = OsString>>(argv: I) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
