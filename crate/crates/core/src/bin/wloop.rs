//! Command-line front end: contour/surface/gauge/group specs wired to the
//! verification and exploration operations, with reproducible seeds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use wloop::diagrams::{classes_at_order, enumerate_matchings, FeynmanDiagram};
use wloop::geometry::{contour_from_json, surface_from_json, Contour, Surface};
use wloop::integrate::{analytic_factor, analytic_factor_via_chi, chi, OrderedDomain};
use wloop::lie::GroupSpec;
use wloop::propagators::GaugeChoice;
use wloop::quad::{QuadMethod, QuadratureConfig};
use wloop::report::{envelope, to_value};
use wloop::wilson::{
    circle_for_rho, explore_third_order, matrix_model_mc, matrix_model_series, verify_theorem1,
    verify_theorem2, EvalContext,
};
use wloop::{Error, Result};

#[derive(Parser)]
#[command(name = "wloop", version, about = "Perturbative Wilson loop calculations in 2D Yang-Mills")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct QuadArgs {
    /// Monte Carlo sample budget.
    #[arg(long, default_value_t = 2_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RNG substream count (deterministic reduction order). Overridden by
    /// the WLL_THREADS environment variable when set.
    #[arg(long, default_value_t = 64)]
    shards: u64,
    /// Use Owen-scrambled Sobol points instead of plain Monte Carlo.
    #[arg(long)]
    sobol: bool,
}

impl QuadArgs {
    fn config(&self) -> QuadratureConfig {
        let shards = std::env::var("WLL_THREADS")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(self.shards);
        let mut cfg = QuadratureConfig::mc(self.samples, self.seed).with_shards(shards);
        if self.sobol {
            cfg = cfg.with_method(QuadMethod::Sobol);
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate order-n Feynman diagrams (perfect matchings).
    Diagrams {
        #[arg(long)]
        order: usize,
        /// Group the matchings into cyclic-rotation classes.
        #[arg(long)]
        classes: bool,
    },
    /// Evaluate the iterated Cauchy-kernel function χ.
    Chi {
        #[arg(long)]
        contour: PathBuf,
        /// Points z_n..z_1 as "(re,im)(re,im)…".
        #[arg(long)]
        points: String,
        /// Integrate over the cyclically ordered domain instead of t₁ ≤ … ≤ t_n.
        #[arg(long)]
        cyclic: bool,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Cyclically-ordered analytic factor of one diagram.
    Factor {
        #[arg(long)]
        contour: PathBuf,
        /// Surface spec file (defaults to the standard plane).
        #[arg(long)]
        surface: Option<PathBuf>,
        /// Matching as "(1,2)(3,4)".
        #[arg(long)]
        diagram: String,
        /// hol | alpha:<radians> | wml:<epsilon>
        #[arg(long, default_value = "hol")]
        gauge: String,
        /// mc (direct) or chi-oracle (region-integral oracle, plane n ≤ 2).
        #[arg(long, default_value = "mc")]
        method: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Gaussian matrix model series coefficients (exact).
    Series {
        #[arg(long)]
        group: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 2)]
        orders: usize,
    },
    /// Area-law verification suites.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Exploratory calculations beyond the verified orders.
    Explore {
        #[command(subcommand)]
        which: ExploreCmd,
    },
    /// Monte Carlo estimate of the Gaussian matrix model expectation.
    GmmMc {
        #[arg(long)]
        group: String,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Plane contours: diagrammatic c₁..c_k vs the matrix model at t = |R|.
    T1 {
        #[arg(long)]
        contour: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "hol")]
        gauge: String,
        #[arg(long, default_value_t = 2)]
        orders: usize,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Circles on the round sphere: factors vs ρⁿ/(2n)!.
    T2 {
        /// Target ρ = |R||S²∖R|/|S²|² (constructs the matching circle).
        #[arg(long, conflicts_with_all = ["contour", "surface"])]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        total_area: f64,
        #[arg(long, requires = "surface")]
        contour: Option<PathBuf>,
        #[arg(long)]
        surface: Option<PathBuf>,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        orders: usize,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Subcommand)]
enum ExploreCmd {
    /// Third-order class factors and assembled c₃ on a plane contour.
    O3 {
        #[arg(long)]
        contour: PathBuf,
        #[arg(long, default_value = "u:1")]
        group: String,
        #[arg(long, default_value = "hol")]
        gauge: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_contour(path: &PathBuf) -> Result<Contour> {
    contour_from_json(&std::fs::read_to_string(path)?)
}

fn load_surface(path: &Option<PathBuf>) -> Result<Surface> {
    match path {
        None => Ok(Surface::PlaneStandard),
        Some(p) => surface_from_json(&std::fs::read_to_string(p)?),
    }
}

fn parse_gauge(s: &str) -> Result<GaugeChoice> {
    if s == "hol" {
        return Ok(GaugeChoice::holomorphic());
    }
    if let Some(v) = s.strip_prefix("alpha:") {
        let a: f64 = v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad gauge '{s}'")))?;
        return GaugeChoice::alpha(a);
    }
    if let Some(v) = s.strip_prefix("wml:") {
        let e: f64 = v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad gauge '{s}'")))?;
        return GaugeChoice::wml(e);
    }
    Err(Error::InvalidParameter(format!(
        "gauge must be hol, alpha:<radians> or wml:<epsilon>, got '{s}'"
    )))
}

/// Parse "(a,b)(c,d)…" into pairs of fields.
fn parse_paren_pairs(s: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| Error::InvalidParameter(format!("expected '(' in '{s}'")))?;
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| Error::InvalidParameter(format!("unclosed '(' in '{s}'")))?
            + open;
        let inner = &rest[open + 1..close];
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidParameter(format!("expected 'a,b' in '({inner})'")))?;
        out.push((a.trim().to_string(), b.trim().to_string()));
        rest = rest[close + 1..].trim();
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!("no pairs in '{s}'")));
    }
    Ok(out)
}

fn parse_points(s: &str) -> Result<Vec<Complex64>> {
    parse_paren_pairs(s)?
        .into_iter()
        .map(|(a, b)| {
            let re: f64 = a
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{a}'")))?;
            let im: f64 = b
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{b}'")))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn parse_diagram(s: &str) -> Result<FeynmanDiagram> {
    let pairs: Vec<(usize, usize)> = parse_paren_pairs(s)?
        .into_iter()
        .map(|(a, b)| {
            let i: usize = a
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad index '{a}'")))?;
            let j: usize = b
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad index '{b}'")))?;
            Ok((i, j))
        })
        .collect::<Result<_>>()?;
    FeynmanDiagram::new(pairs.len(), pairs)
}

fn emit(format: Format, report: &Value, table: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        Format::Table => print!("{table}"),
        Format::Csv => {
            println!("key,value");
            flatten_csv("", &report["result"], &mut |k, v| println!("{k},{v}"));
        }
    }
}

fn flatten_csv(prefix: &str, v: &Value, emit: &mut dyn FnMut(&str, String)) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_csv(&key, val, emit);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten_csv(&format!("{prefix}[{i}]"), val, emit);
            }
        }
        other => emit(prefix, other.to_string()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Diagrams { order, classes } => {
            let all = enumerate_matchings(order)?;
            let result = if classes {
                let cls = cyclic_summary(order)?;
                json!({ "order": order, "count": all.len(), "classes": cls })
            } else {
                json!({ "order": order, "count": all.len(), "diagrams": to_value(&all) })
            };
            let report = envelope("diagrams", None, result);
            let mut table = format!("order {order}: {} diagrams\n", all.len());
            if classes {
                for c in classes_at_order(order)? {
                    table.push_str(&format!(
                        "  class {:?} (orbit {})\n",
                        c.representative.pairs, c.orbit_size
                    ));
                }
            } else {
                for d in &all {
                    table.push_str(&format!("  {:?}\n", d.pairs));
                }
            }
            emit(format, &report, table);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Chi {
            contour,
            points,
            cyclic,
            quad,
        } => {
            let c = load_contour(&contour)?;
            let pts = parse_points(&points)?;
            let cfg = quad.config();
            let domain = if cyclic {
                OrderedDomain::cyclic(pts.len())
            } else {
                OrderedDomain::path(pts.len())
            };
            let e = chi(&c, &pts, domain, &cfg)?;
            let result = json!({
                "value_re": e.value.re,
                "value_im": e.value.im,
                "est_err": e.est_err,
                "samples": e.samples,
                "seed": cfg.seed,
            });
            let report = envelope("chi", Some(&cfg), result);
            let table = format!(
                "chi = {:+.6} {:+.6}i  (± {:.2e}, {} samples)\n",
                e.value.re, e.value.im, e.est_err, e.samples
            );
            emit(format, &report, table);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Factor {
            contour,
            surface,
            diagram,
            gauge,
            method,
            quad,
        } => {
            let c = load_contour(&contour)?;
            let s = load_surface(&surface)?;
            let d = parse_diagram(&diagram)?;
            let g = parse_gauge(&gauge)?;
            let cfg = quad.config();
            let e = match method.as_str() {
                "mc" => analytic_factor(&c, &s, g, &d, &cfg)?,
                "chi-oracle" => {
                    if !s.is_plane() || !g.is_holomorphic() {
                        return Err(Error::Unsupported(
                            "chi-oracle requires the plane and holomorphic gauge".into(),
                        ));
                    }
                    analytic_factor_via_chi(&c, &cfg, &d)?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "method must be mc or chi-oracle, got '{other}'"
                    )))
                }
            };
            let result = json!({
                "diagram": to_value(&d),
                "method": method,
                "value_re": e.value.re,
                "value_im": e.value.im,
                "est_err": e.est_err,
                "samples": e.samples,
                "rejected": e.rejected,
                "seed": cfg.seed,
            });
            let report = envelope("factor", Some(&cfg), result);
            let table = format!(
                "factor[{:?}] = {:+.6} {:+.6}i  (± {:.2e}, {} samples)\n",
                d.pairs, e.value.re, e.value.im, e.est_err, e.samples
            );
            emit(format, &report, table);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Series { group, t, orders } => {
            let g: GroupSpec = group.parse()?;
            let s = matrix_model_series(g, t, orders)?;
            let result = json!({
                "group": g.to_string(),
                "t": t,
                "coefficients": s.coefficients,
            });
            let report = envelope("series", None, result);
            let mut table = format!("{g} matrix model series at t = {t}:\n");
            for (n, c) in s.coefficients.iter().enumerate() {
                table.push_str(&format!("  c{n} = {c:+.10}\n"));
            }
            emit(format, &report, table);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { which } => match which {
            VerifyCmd::T1 {
                contour,
                group,
                gauge,
                orders,
                quad,
            } => {
                let c = load_contour(&contour)?;
                let g: GroupSpec = group.parse()?;
                let gauge = parse_gauge(&gauge)?;
                let cfg = quad.config();
                let ctx = EvalContext::new(c, Surface::PlaneStandard, gauge, g, orders)?;
                let r = verify_theorem1(&ctx, &cfg)?;
                let report = envelope("verify-t1", Some(&cfg), to_value(&r));
                let mut table = format!(
                    "theorem 1 check, {g}, |R| = {:.6}:\n",
                    r.area
                );
                for ch in &r.checks {
                    table.push_str(&format!(
                        "  c{} = {:+.6} ± {:.1e}  vs  {:+.6}  [{}]\n",
                        ch.order,
                        ch.computed,
                        ch.est_err,
                        ch.predicted,
                        if ch.pass { "pass" } else { "FAIL" }
                    ));
                }
                table.push_str(if r.pass { "PASS\n" } else { "FAIL\n" });
                emit(format, &report, table);
                Ok(exit_for(r.pass))
            }
            VerifyCmd::T2 {
                rho,
                total_area,
                contour,
                surface,
                group,
                orders,
                quad,
            } => {
                let g: GroupSpec = group.parse()?;
                let cfg = quad.config();
                let (c, s) = match (rho, contour) {
                    (Some(rho), _) => circle_for_rho(rho, total_area)?,
                    (None, Some(path)) => (load_contour(&path)?, load_surface(&surface)?),
                    (None, None) => {
                        return Err(Error::InvalidParameter(
                            "verify t2 needs --rho or --contour/--surface".into(),
                        ))
                    }
                };
                let ctx = EvalContext::new(c, s, GaugeChoice::holomorphic(), g, orders)?;
                let r = verify_theorem2(&ctx, &cfg)?;
                let report = envelope("verify-t2", Some(&cfg), to_value(&r));
                let mut table = format!(
                    "theorem 2 check, {g}, |R| = {:.6}, rho = {:.6}\n  series: {:?}\n",
                    r.region_area, r.rho, r.series
                );
                for ch in r.factor_checks.iter().chain(r.cov_checks.iter()) {
                    table.push_str(&format!(
                        "  n={} {}: {:+.6e} ± {:.1e}  vs  {:+.6e}  [{}]\n",
                        ch.order,
                        ch.diagram,
                        ch.computed,
                        ch.est_err,
                        ch.predicted,
                        if ch.pass { "pass" } else { "FAIL" }
                    ));
                }
                table.push_str(if r.pass { "PASS\n" } else { "FAIL\n" });
                emit(format, &report, table);
                Ok(exit_for(r.pass))
            }
        },
        Cmd::Explore { which } => match which {
            ExploreCmd::O3 {
                contour,
                group,
                gauge,
                quad,
            } => {
                let c = load_contour(&contour)?;
                let g: GroupSpec = group.parse()?;
                let gauge = parse_gauge(&gauge)?;
                let cfg = quad.config();
                let ctx = EvalContext::new(c, Surface::PlaneStandard, gauge, g, 3)?;
                let r = explore_third_order(&ctx, &cfg)?;
                let report = envelope("explore-o3", Some(&cfg), to_value(&r));
                let mut table = format!(
                    "third-order exploration, {g}, |R| = {:.6}:\n",
                    r.area
                );
                for cl in &r.classes {
                    table.push_str(&format!(
                        "  {} (orbit {}): lie = {:+.4}, analytic = {:+.6e} ± {:.1e} (circle value {:.6e}, {:.1}σ away)\n",
                        cl.diagram,
                        cl.orbit_size,
                        cl.lie,
                        cl.analytic,
                        cl.est_err,
                        cl.circle_value,
                        cl.sigma_from_circle
                    ));
                }
                table.push_str(&format!(
                    "  c3 = {:+.6e} ± {:.1e}  vs matrix model {:+.6e}  [{}]\n",
                    r.c3,
                    r.c3_err,
                    r.matrix_model_c3,
                    if r.consistent { "consistent" } else { "deviates" }
                ));
                emit(format, &report, table);
                // exploratory: report only, never a failure exit
                Ok(ExitCode::SUCCESS)
            }
        },
        Cmd::GmmMc { group, t, quad } => {
            let g: GroupSpec = group.parse()?;
            let cfg = quad.config();
            let (v, e) = matrix_model_mc(g, t, &cfg)?;
            let result = json!({
                "group": g.to_string(),
                "t": t,
                "value": v,
                "est_err": e,
                "seed": cfg.seed,
            });
            let report = envelope("gmm-mc", Some(&cfg), result);
            let table = format!("{g} Gaussian matrix model at t = {t}: {v:.6} ± {e:.2e}\n");
            emit(format, &report, table);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cyclic_summary(order: usize) -> Result<Value> {
    let cls = classes_at_order(order)?;
    Ok(Value::Array(
        cls.iter()
            .map(|c| {
                json!({
                    "representative": to_value(&c.representative),
                    "orbit_size": c.orbit_size,
                })
            })
            .collect(),
    ))
}
