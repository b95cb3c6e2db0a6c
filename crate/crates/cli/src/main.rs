//! `gindex`: index tables, characteristic-class listings, verification
//! suites and the shadow/section/inertia solvers, with JSON or CSV output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gindex_core::geometry::{inertia_char_coeffs, SectionBody};
use gindex_core::index::{closed_form_power, two_adic_valuation};
use gindex_core::solver::{start_rng, DEFAULT_SEED};
use gindex_core::{
    borel_e2_dimension, dual_classes, index_power, shadow_functionals, solve_equal_shadows,
    solve_inertia_split, solve_sections, tensor_expand, verify_prop_relations, verify_t_vanishing,
    ConvexBody, Error, Functional, GrassmannFrame, GrassmannRing, PlanarValues, PointCloud,
    SolverConfig, SolverResult, Variant, WreathContext, WreathElement,
};
use rand::Rng;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "gindex", version, about = "Z/2-index of Grassmannians and equal-shadow subspaces")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Oriented,
    Unoriented,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Oriented => Variant::Oriented,
            VariantArg::Unoriented => Variant::Unoriented,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Thm1,
    Thm2,
    PropCalculus,
    CorVanishing,
    WreathOracle,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal power of t in the kernel ideal, with its certificate.
    Index {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Unoriented)]
        variant: VariantArg,
    },
    /// Stiefel–Whitney classes of the wreath square.
    SwClasses {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Unoriented)]
        variant: VariantArg,
        /// Only this degree (default: all of 1..=2n).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Dual classes w̄_1..w̄_k of the tautological n-plane bundle.
    DualClasses {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Graded dimensions of H*(G_n(R^{n+k}); F_2).
    RingDims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// E_2 page of the Borel construction of G_n(R^2n) under V -> V⊥.
    E2Table {
        #[arg(long)]
        n: usize,
        /// Last column (cohomological degree of Z/2).
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Runs a verification suite; exits 1 if any case fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Random pairs per context for the wreath oracle.
        #[arg(long, default_value_t = 200)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// 2-plane V ⊂ R^4 whose shadow matches the shadow on V⊥.
    ShadowSolve(SolveArgs),
    /// 2-plane V ⊂ R^4 whose central section matches the one on V⊥.
    ShadowSections(SolveArgs),
    /// Half-dimensional V splitting a point cloud's inertia evenly.
    Inertia {
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value = "area,perimeter,circumradius")]
    functionals: String,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            starts: self.starts,
            tol: self.tol,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

/// What a command produces: a JSON document, a CSV table, and whether a
/// verification it ran came out clean.
struct Output {
    json: Value,
    csv: Vec<Vec<String>>,
    ok: bool,
}

impl Output {
    fn new(json: Value, csv: Vec<Vec<String>>) -> Self {
        Output { json, csv, ok: true }
    }
}

fn row<I: IntoIterator<Item = T>, T: ToString>(cells: I) -> Vec<String> {
    cells.into_iter().map(|c| c.to_string()).collect()
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn index_cmd(n: usize, variant: Variant) -> Result<Output, Error> {
    let c = index_power(n, variant)?;
    let csv = vec![
        row(["n", "variant", "index_power", "closed_form_only", "witness_in", "witness_out"]),
        row([
            n.to_string(),
            variant.to_string(),
            c.s.to_string(),
            c.closed_form_only.to_string(),
            c.witness_in.to_string(),
            c.witness_out.to_string(),
        ]),
    ];
    Ok(Output::new(serde_json::to_value(&c).expect("certificate serializes"), csv))
}

fn sw_classes_cmd(n: usize, variant: Variant, k: Option<usize>) -> Result<Output, Error> {
    let ctx = variant.context(n)?;
    let degrees: Vec<usize> = match k {
        Some(k) if k == 0 || k > 2 * n => {
            return Err(Error::DegreeOutOfRange { degree: k, max: 2 * n })
        }
        Some(k) => vec![k],
        None => (1..=2 * n).collect(),
    };
    let mut classes = Vec::new();
    let mut csv = vec![row(["degree", "class"])];
    for d in degrees {
        let text = ctx.format(&ctx.sw_component(d)?);
        csv.push(row([d.to_string(), text.clone()]));
        classes.push(json!({ "degree": d, "class": text }));
    }
    Ok(Output::new(json!({ "n": n, "variant": variant, "classes": classes }), csv))
}

fn dual_classes_cmd(n: usize, k: usize) -> Result<Output, Error> {
    let (alphabet, duals) = dual_classes(n, k)?;
    let mut classes = Vec::new();
    let mut csv = vec![row(["degree", "class"])];
    for (j, p) in duals.iter().enumerate() {
        let text = alphabet.format_poly(p);
        csv.push(row([(j + 1).to_string(), text.clone()]));
        classes.push(json!({ "degree": j + 1, "class": text }));
    }
    Ok(Output::new(json!({ "n": n, "k": k, "classes": classes }), csv))
}

fn ring_dims_cmd(n: usize, k: Option<usize>, degree: Option<usize>) -> Result<Output, Error> {
    let k = k.unwrap_or(n);
    let ring = GrassmannRing::new(n, k)?;
    let degrees: Vec<usize> = match degree {
        Some(j) => vec![j],
        None => (0..=ring.top_degree()).collect(),
    };
    let mut dims = Vec::new();
    let mut csv = vec![row(["degree", "dimension"])];
    for j in degrees {
        let d = ring.graded_dimension(j)?;
        csv.push(row([j, d]));
        dims.push(json!({ "degree": j, "dimension": d }));
    }
    Ok(Output::new(json!({ "n": n, "k": k, "dims": dims }), csv))
}

fn e2_table_cmd(n: usize, max_degree: usize) -> Result<Output, Error> {
    let ring = GrassmannRing::new(n, n)?;
    let mut rows = Vec::new();
    let mut csv = vec![row(std::iter::once("j\\i".to_string()).chain((0..=max_degree).map(|i| i.to_string())))];
    for j in 0..=ring.top_degree() {
        let r: Vec<usize> = (0..=max_degree)
            .map(|i| borel_e2_dimension(&ring, i, j))
            .collect::<Result<_, _>>()?;
        csv.push(row(std::iter::once(j).chain(r.iter().copied())));
        rows.push(r);
    }
    Ok(Output::new(
        json!({ "n": n, "columns": max_degree + 1, "rows": rows }),
        csv,
    ))
}

fn variants(v: Option<VariantArg>) -> Vec<Variant> {
    match v {
        Some(v) => vec![v.into()],
        None => vec![Variant::Unoriented, Variant::Oriented],
    }
}

fn random_element(ctx: &WreathContext, rng: &mut impl Rng, max_degree: u32) -> WreathElement {
    let d = rng.random_range(0..=max_degree);
    ctx.element(ctx.degree_slice_basis(d).into_iter().filter(|_| rng.random_bool(0.3)))
}

struct Case {
    name: String,
    pass: bool,
    detail: Value,
}

fn verify_cmd(
    suite: Suite,
    n_list: Option<Vec<usize>>,
    variant: Option<VariantArg>,
    pairs: usize,
    max_degree: u32,
    seed: u64,
) -> Result<Output, Error> {
    let mut cases = Vec::new();
    let (suite_name, default_ns): (&str, Vec<usize>) = match suite {
        Suite::Thm1 => ("thm1", vec![2, 4, 6, 8]),
        Suite::Thm2 => ("thm2", (1..=8).collect()),
        Suite::PropCalculus => ("prop-calculus", vec![2, 4, 6, 8, 12]),
        Suite::CorVanishing => ("cor-vanishing", vec![2, 4, 6, 8, 12]),
        Suite::WreathOracle => ("wreath-oracle", vec![1, 2, 3, 4]),
    };
    let ns = n_list.unwrap_or(default_ns);
    if ns.is_empty() {
        return Err(Error::InvalidInput("empty --n-list".into()));
    }
    let needs_even = matches!(suite, Suite::PropCalculus | Suite::CorVanishing);
    if let Some(&n) = ns.iter().find(|&&n| n == 0 || (needs_even && n % 2 == 1)) {
        return Err(Error::InvalidInput(format!(
            "suite {suite_name} cannot take n = {n}"
        )));
    }
    for &n in &ns {
        match suite {
            Suite::Thm1 | Suite::Thm2 => {
                let v = if matches!(suite, Suite::Thm1) { Variant::Oriented } else { Variant::Unoriented };
                let cert = index_power(n, v)?;
                let want = closed_form_power(n, v)?;
                cases.push(Case {
                    name: format!("n={n} {v}"),
                    pass: cert.s == want && (cert.closed_form_only || (cert.witness_in && cert.witness_out)),
                    detail: json!({ "computed": cert.s, "expected": want, "closed_form_only": cert.closed_form_only }),
                });
            }
            Suite::PropCalculus => {
                let top = (1usize << (two_adic_valuation(n) + 1)) - 1;
                for v in variants(variant) {
                    for k in 1..=top {
                        cases.push(Case {
                            name: format!("n={n} {v} k={k}"),
                            pass: verify_prop_relations(n, v, k)?,
                            detail: json!({ "k": k }),
                        });
                    }
                }
            }
            Suite::CorVanishing => {
                for v in variants(variant) {
                    cases.push(Case {
                        name: format!("n={n} {v}"),
                        pass: verify_t_vanishing(n, v)?,
                        detail: json!({ "power": 1u32 << (two_adic_valuation(n) + 1) }),
                    });
                }
            }
            Suite::WreathOracle => {
                for v in variants(variant) {
                    let ctx = v.context(n)?;
                    let mut rng = start_rng(seed, n);
                    let mut bad = 0;
                    for _ in 0..pairs {
                        let x = random_element(&ctx, &mut rng, max_degree);
                        let y = random_element(&ctx, &mut rng, max_degree);
                        let xy = x.multiply(&y)?;
                        if tensor_expand(&xy) != tensor_expand(&x).mul(&tensor_expand(&y)) {
                            bad += 1;
                        }
                    }
                    cases.push(Case {
                        name: format!("n={n} {v}"),
                        pass: bad == 0,
                        detail: json!({ "pairs": pairs, "mismatches": bad, "seed": seed }),
                    });
                }
            }
        }
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    for c in &cases {
        eprintln!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    eprintln!("{passed}/{} cases passed", cases.len());
    let mut csv = vec![row(["case", "pass"])];
    csv.extend(cases.iter().map(|c| row([c.name.clone(), c.pass.to_string()])));
    let json_cases: Vec<Value> = cases
        .iter()
        .map(|c| json!({ "case": c.name, "pass": c.pass, "detail": c.detail }))
        .collect();
    let total = cases.len();
    Ok(Output {
        json: json!({ "suite": suite_name, "cases": json_cases, "passed": passed, "total": total }),
        csv,
        ok: passed == total,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("cannot parse {}: {e}", path.display())))
}

fn planar_map(v: &PlanarValues, selection: &[Functional]) -> Value {
    let mut m = Map::new();
    for &f in selection {
        m.insert(f.name().into(), json!(v.get(f)));
    }
    Value::Object(m)
}

fn frame_columns(f: &GrassmannFrame) -> Vec<Vec<f64>> {
    f.columns().column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn result_output(r: &SolverResult, seed: u64, values_v: Value, values_vperp: Value) -> Output {
    let frame = frame_columns(&r.frame);
    let mut csv = vec![row(["field", "value"])];
    csv.push(row(["residual".to_string(), r.residual.to_string()]));
    csv.push(row(["converged".to_string(), r.converged.to_string()]));
    csv.push(row(["starts_used".to_string(), r.starts_used.to_string()]));
    csv.push(row(["seed".to_string(), seed.to_string()]));
    for (j, col) in frame.iter().enumerate() {
        let text: Vec<String> = col.iter().map(|x| x.to_string()).collect();
        csv.push(row([format!("frame[{j}]"), text.join(" ")]));
    }
    for (label, vals) in [("V", &values_v), ("Vperp", &values_vperp)] {
        if let Value::Object(m) = vals {
            for (k, x) in m {
                csv.push(row([format!("{k}_{label}"), x.to_string()]));
            }
        }
    }
    Output::new(
        json!({
            "frame": frame,
            "residual": r.residual,
            "values_V": values_v,
            "values_Vperp": values_vperp,
            "converged": r.converged,
            "starts_used": r.starts_used,
            "evaluations": r.evaluations,
            "seed": seed,
            "warnings": r.warnings,
        }),
        csv,
    )
}

fn shadow_cmd(args: &SolveArgs, sections: bool) -> Result<Output, Error> {
    let body: ConvexBody = read_json(&args.body)?;
    let selection = Functional::parse_list(&args.functionals)?;
    let cfg = args.solver.config();
    let (r, v, w) = if sections {
        let r = solve_sections(&body, &selection, &cfg)?;
        let sb = SectionBody::new(&body)?;
        let v = sb.section_functionals(&r.frame)?;
        let w = sb.section_functionals(&r.frame.complement())?;
        (r, v, w)
    } else {
        let r = solve_equal_shadows(&body, &selection, &cfg)?;
        let v = shadow_functionals(&body, &r.frame)?;
        let w = shadow_functionals(&body, &r.frame.complement())?;
        (r, v, w)
    };
    Ok(result_output(&r, cfg.seed, planar_map(&v, &selection), planar_map(&w, &selection)))
}

fn coeff_map(coeffs: &[f64], dim: usize) -> Value {
    let mut m = Map::new();
    for (i, c) in coeffs.iter().enumerate() {
        m.insert(format!("lambda^{}", dim - 1 - i), json!(c));
    }
    Value::Object(m)
}

fn inertia_cmd(points: &Path, solver: &SolverArgs) -> Result<Output, Error> {
    let cloud: PointCloud = read_json(points)?;
    let cfg = solver.config();
    let r = solve_inertia_split(&cloud, &cfg)?;
    let dim = cloud.dimension();
    let v = inertia_char_coeffs(&cloud, &r.frame)?;
    let w = inertia_char_coeffs(&cloud, &r.frame.complement())?;
    Ok(result_output(&r, cfg.seed, coeff_map(&v, dim), coeff_map(&w, dim)))
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Index { n, variant } => index_cmd(*n, (*variant).into()),
        Command::SwClasses { n, variant, k } => sw_classes_cmd(*n, (*variant).into(), *k),
        Command::DualClasses { n, k } => dual_classes_cmd(*n, *k),
        Command::RingDims { n, k, degree } => ring_dims_cmd(*n, *k, *degree),
        Command::E2Table { n, max_degree } => e2_table_cmd(*n, *max_degree),
        Command::Verify { suite, n_list, variant, k, max_degree, seed } => {
            verify_cmd(*suite, n_list.clone(), *variant, *k, *max_degree, *seed)
        }
        Command::ShadowSolve(args) => shadow_cmd(args, false),
        Command::ShadowSections(args) => shadow_cmd(args, true),
        Command::Inertia { points, solver } => inertia_cmd(points, solver),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("valid JSON")),
                Format::Csv => {
                    for r in &out.csv {
                        let cells: Vec<String> = r.iter().map(|c| csv_cell(c)).collect();
                        println!("{}", cells.join(","));
                    }
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Internal(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
