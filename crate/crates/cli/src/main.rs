//! `polar-srg`: build, switch, verify and compare polar space graphs.
//!
//! Exit codes: 0 success, 2 verification failed, 3 inconclusive
//! certificate, 4 input or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polar_srg::noniso::{build_gamma1, certify_noniso, NonIsoError};
use polar_srg::specfile::{parse_basis, parse_spec, rows_to_subspace, subspace_rows, write_spec};
use polar_srg::{
    Graph, GraphError, PolarKind, PolarSpace, ProjectivePoint, SigmaSource, SrgParams, SwitchContext,
    SwitchSpec,
};

const VERSION: &str = concat!("polar-srg ", env!("CARGO_PKG_VERSION"));

#[derive(Parser)]
#[command(name = "polar-srg", version, about = "Strongly regular graphs from finite classical polar spaces")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "POLAR_SRG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the collinearity graph of a polar space.
    Build {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a switched graph and its switch spec.
    Switch {
        #[command(flatten)]
        space: OptSpaceArgs,
        /// Basis of L, one vector per line (default: greedy choice).
        #[arg(long)]
        l_basis: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "random")]
        sigma: SigmaArg,
        /// Seed for `--sigma random`.
        #[arg(long)]
        seed: Option<u64>,
        /// Swap for `--sigma swap`: generator, class, slot, slot.
        #[arg(long, num_args = 4, value_names = ["I", "CLASS", "A", "B"])]
        swap: Option<Vec<usize>>,
        /// Read the whole switch from a spec file instead.
        #[arg(long, conflicts_with_all = ["kind", "l_basis", "seed", "swap"])]
        spec_in: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify that a graph is strongly regular.
    Check {
        graph: PathBuf,
        /// Also compare with the formula for this space.
        #[command(flatten)]
        space: OptSpaceArgs,
    },
    /// Print the triangle common-neighbour histogram.
    Spectrum { graph: PathBuf },
    /// Separate two graphs by their triangle spectra.
    Compare {
        g0: PathBuf,
        g1: PathBuf,
        /// Require this value to be a distinguishing one.
        #[arg(long)]
        expect: Option<u64>,
    },
    /// Build the single-swap graph and certify it against the collinearity graph.
    Gamma1 {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        l_basis: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    kind: PolarKind,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    d: usize,
}

#[derive(Args)]
struct OptSpaceArgs {
    #[arg(long, requires_all = ["q", "d"])]
    kind: Option<PolarKind>,
    #[arg(long, requires = "kind")]
    q: Option<u64>,
    #[arg(long, requires = "kind")]
    d: Option<usize>,
}

impl OptSpaceArgs {
    fn get(&self) -> Option<(PolarKind, u64, usize)> {
        Some((self.kind?, self.q?, self.d?))
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output path prefix; `.g6`, `.json` (and `.spec`) are appended.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write a DIMACS edge list.
    #[arg(long)]
    dimacs: bool,
    /// Skip the strong regularity check.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    Identity,
    Random,
    Complement,
    Swap,
}

enum Failure {
    Verification(String),
    Inconclusive(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 2,
            Failure::Inconclusive(_) => 3,
            Failure::Input(_) => 4,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn graph_failure(e: GraphError) -> Failure {
    match e {
        GraphError::NotRegular { .. } | GraphError::NotSrg { .. } | GraphError::Degenerate(_) => {
            Failure::Verification(e.to_string())
        }
        other => input(other),
    }
}

#[derive(Serialize)]
struct SpaceMeta {
    kind: String,
    q: u64,
    d: usize,
    label: String,
    field_modulus: Vec<u32>,
}

#[derive(Serialize)]
struct Sidecar {
    construction: &'static str,
    tool: &'static str,
    space: SpaceMeta,
    formula: ParamsMeta,
    verified: Option<ParamsMeta>,
    l_basis: Option<Vec<Vec<u32>>>,
    sigma: Option<String>,
    graph6: String,
    spec: Option<String>,
    /// Vertex `i` is the projective point with these coordinates.
    vertices: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct ParamsMeta {
    v: u64,
    k: u64,
    lambda: u64,
    mu: u64,
}

impl From<SrgParams> for ParamsMeta {
    fn from(p: SrgParams) -> Self {
        ParamsMeta {
            v: p.v,
            k: p.k,
            lambda: p.lambda,
            mu: p.mu,
        }
    }
}

fn space_meta(space: &PolarSpace) -> SpaceMeta {
    SpaceMeta {
        kind: space.kind().slug().to_string(),
        q: space.q(),
        d: space.rank(),
        label: space.label(),
        field_modulus: space.field().modulus().to_vec(),
    }
}

fn coords(points: &[ProjectivePoint]) -> Vec<Vec<u32>> {
    points
        .iter()
        .map(|p| p.rep().iter().map(|e| e.index()).collect())
        .collect()
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read(path)?;
    let is_dimacs = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("dimacs" | "col" | "clq")
    );
    let g = if is_dimacs {
        Graph::from_dimacs(&text)
    } else {
        Graph::from_graph6(text.as_bytes())
    };
    g.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Vertex coordinates from the sidecar next to a graph file, if any.
fn sidecar_labels(path: &Path) -> Option<Vec<String>> {
    let text = fs::read_to_string(path.with_extension("json")).ok()?;
    let value: serde_json::Value = serde_json::from_str(&text).ok()?;
    value.get("vertices")?.as_array().map(|vs| {
        vs.iter()
            .map(|v| {
                let parts: Vec<String> = v
                    .as_array()
                    .map(|xs| xs.iter().map(|x| x.to_string()).collect())
                    .unwrap_or_default();
                format!("({})", parts.join(","))
            })
            .collect()
    })
}

struct Output<'a> {
    construction: &'static str,
    ctx_space: &'a PolarSpace,
    points: &'a [ProjectivePoint],
    graph: &'a Graph,
    spec: Option<&'a SwitchSpec>,
}

fn write_outputs(args: &OutArgs, o: Output<'_>) -> Result<(), Failure> {
    let formula = o.ctx_space.srg_params().map_err(input)?;
    let verified = if args.no_verify {
        None
    } else {
        let got = o.graph.srg_check().map_err(graph_failure)?;
        if got != formula {
            return Err(Failure::Verification(format!("graph is SRG{got}, formula gives {formula}")));
        }
        println!("verified: strongly regular {got}");
        Some(got.into())
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::Input(format!("{}: {e}", parent.display())))?;
    }
    let g6_path = with_ext(&args.out, "g6");
    let mut g6 = o.graph.to_graph6().map_err(input)?;
    g6.push(b'\n');
    write(&g6_path, &g6)?;
    if args.dimacs {
        write(&with_ext(&args.out, "dimacs"), o.graph.to_dimacs().as_bytes())?;
    }
    let spec_path = with_ext(&args.out, "spec");
    if let Some(spec) = o.spec {
        write(&spec_path, write_spec(spec).as_bytes())?;
    }
    let sidecar = Sidecar {
        construction: o.construction,
        tool: VERSION,
        space: space_meta(o.ctx_space),
        formula: formula.into(),
        verified,
        l_basis: o.spec.map(|s| subspace_rows(&s.l)),
        sigma: o.spec.map(|s| s.source.to_string()),
        graph6: file_name(&g6_path),
        spec: o.spec.map(|_| file_name(&spec_path)),
        vertices: coords(o.points),
    };
    let mut json = serde_json::to_string_pretty(&sidecar).map_err(input)?;
    json.push('\n');
    write(&with_ext(&args.out, "json"), json.as_bytes())?;
    println!("wrote {}", g6_path.display());
    Ok(())
}

fn context(kind: PolarKind, q: u64, d: usize, l_basis: Option<&Path>) -> Result<SwitchContext, Failure> {
    let space = PolarSpace::new(kind, q, d).map_err(input)?;
    match l_basis {
        None => SwitchContext::canonical(space).map_err(input),
        Some(path) => {
            let rows = parse_basis(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let l = rows_to_subspace(space.field(), space.ambient_dim(), &rows).map_err(input)?;
            SwitchContext::new(space, l).map_err(input)
        }
    }
}

fn cmd_build(space: &SpaceArgs, out: &OutArgs) -> Result<(), Failure> {
    let polar = PolarSpace::new(space.kind, space.q, space.d).map_err(input)?;
    polar.srg_params().map_err(input)?;
    let points = polar.isotropic_points().map_err(input)?;
    let graph = polar_srg::switching::collinearity_graph(&polar).map_err(input)?;
    println!("{}: {} points", polar.label(), points.len());
    write_outputs(
        out,
        Output {
            construction: "collinearity graph",
            ctx_space: &polar,
            points: &points,
            graph: &graph,
            spec: None,
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_switch(
    space: &OptSpaceArgs,
    l_basis: Option<&Path>,
    sigma: SigmaArg,
    seed: Option<u64>,
    swap: Option<&[usize]>,
    spec_in: Option<&Path>,
    out: &OutArgs,
) -> Result<(), Failure> {
    let (ctx, spec) = if let Some(path) = spec_in {
        let syntax = parse_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let ctx = syntax.context().map_err(input)?;
        let spec = syntax.to_spec(&ctx).map_err(input)?;
        (ctx, spec)
    } else {
        let (kind, q, d) = space
            .get()
            .ok_or_else(|| Failure::Input("--kind, --q and --d are required without --spec-in".into()))?;
        let ctx = context(kind, q, d, l_basis)?;
        let source = match sigma {
            SigmaArg::Identity => SigmaSource::Identity,
            SigmaArg::Complement => SigmaSource::Complement,
            SigmaArg::Random => SigmaSource::Random {
                seed: seed.ok_or_else(|| Failure::Input("--sigma random needs --seed".into()))?,
            },
            SigmaArg::Swap => {
                let s = swap.unwrap_or(&[0, 0, 0, 1]);
                SigmaSource::Swap {
                    generator: s[0],
                    class: s[1],
                    slots: (s[2], s[3]),
                }
            }
        };
        let spec = ctx.sigma_from_source(&source).map_err(input)?;
        (ctx, spec)
    };
    let graph = ctx.build_switched_graph(&spec).map_err(input)?;
    println!(
        "{}: switched with sigma {}{}",
        ctx.space().label(),
        spec.source,
        if &graph == ctx.collinearity() { " (graph unchanged)" } else { "" }
    );
    write_outputs(
        out,
        Output {
            construction: "subgeometry switching",
            ctx_space: ctx.space(),
            points: ctx.points(),
            graph: &graph,
            spec: Some(&spec),
        },
    )
}

fn cmd_check(path: &Path, space: &OptSpaceArgs) -> Result<(), Failure> {
    let g = read_graph(path)?;
    let got = g.srg_check().map_err(graph_failure)?;
    println!("strongly regular {got}");
    if let Some((kind, q, d)) = space.get() {
        let polar = PolarSpace::new(kind, q, d).map_err(input)?;
        let want = polar.srg_params().map_err(input)?;
        println!("formula for {}: {want}", polar.label());
        if got != want {
            return Err(Failure::Verification("parameters differ from the formula".into()));
        }
    }
    Ok(())
}

fn cmd_spectrum(path: &Path) -> Result<(), Failure> {
    let g = read_graph(path)?;
    let s = g.triangle_spectrum().map_err(input)?;
    println!("triangles: {}", s.triangle_count());
    println!("common neighbours: count");
    for (value, count) in &s.histogram {
        println!("{value}: {count}");
    }
    Ok(())
}

fn cmd_compare(p0: &Path, p1: &Path, expect: Option<u64>) -> Result<(), Failure> {
    let g0 = read_graph(p0)?;
    let g1 = read_graph(p1)?;
    let cert = certify_noniso(&g0, &g1, expect, None).map_err(noniso_failure)?;
    print!("{}", cert.report(None));
    let labels = if cert.witness_graph == 1 { sidecar_labels(p1) } else { sidecar_labels(p0) };
    if let Some(labels) = labels {
        for v in cert.witness_triple {
            if let Some(l) = labels.get(v) {
                println!("  {v} = {l}");
            }
        }
    }
    Ok(())
}

fn noniso_failure(e: NonIsoError) -> Failure {
    match e {
        NonIsoError::SpectraEqual => Failure::Inconclusive(e.to_string()),
        NonIsoError::WrongWitness { .. } | NonIsoError::Invariant(_) => Failure::Verification(e.to_string()),
        other => input(other),
    }
}

fn cmd_gamma1(space: &SpaceArgs, l_basis: Option<&Path>, out: &OutArgs) -> Result<(), Failure> {
    let ctx = context(space.kind, space.q, space.d, l_basis)?;
    let (g1, recipe) = build_gamma1(&ctx).map_err(noniso_failure)?;
    let spec = recipe.spec(&ctx).map_err(noniso_failure)?;
    print!("{}", recipe.report());
    write_outputs(
        out,
        Output {
            construction: "subgeometry switching, single parallel hyperplane swap",
            ctx_space: ctx.space(),
            points: ctx.points(),
            graph: &g1,
            spec: Some(&spec),
        },
    )?;
    let expected = polar_srg::noniso::gamma1_value(ctx.space()).map_err(input)?;
    match certify_noniso(ctx.collinearity(), &g1, Some(expected), Some(recipe.triple)) {
        Ok(cert) => {
            print!("{}", cert.report(Some(ctx.points())));
            Ok(())
        }
        Err(NonIsoError::Graph(GraphError::TooLarge { n, limit })) => {
            println!("certificate skipped: {n} vertices exceeds the triangle scan limit {limit}");
            let common = g1.common_neighbors(&recipe.triple).map_err(input)?;
            println!("recipe triple has {common} common neighbours (expected {expected})");
            if common as u64 == expected {
                Ok(())
            } else {
                Err(Failure::Verification("recipe triple has the wrong co-degree".into()))
            }
        }
        Err(e) => Err(noniso_failure(e)),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(input)?;
    }
    match &cli.command {
        Command::Build { space, out } => cmd_build(space, out),
        Command::Switch {
            space,
            l_basis,
            sigma,
            seed,
            swap,
            spec_in,
            out,
        } => cmd_switch(
            space,
            l_basis.as_deref(),
            *sigma,
            *seed,
            swap.as_deref(),
            spec_in.as_deref(),
            out,
        ),
        Command::Check { graph, space } => cmd_check(graph, space),
        Command::Spectrum { graph } => cmd_spectrum(graph),
        Command::Compare { g0, g1, expect } => cmd_compare(g0, g1, *expect),
        Command::Gamma1 { space, l_basis, out } => cmd_gamma1(space, l_basis.as_deref(), out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (label, msg) = match &f {
                Failure::Verification(m) => ("verification failed", m),
                Failure::Inconclusive(m) => ("inconclusive", m),
                Failure::Input(m) => ("error", m),
            };
            eprintln!("{label}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
