//! Command-line driver: mesh generation and ingestion, patch tests,
//! convergence studies, single solves with field dumps, and mesh
//! diagnostics.
//!
//! Exit codes: 0 = pass, 1 = tolerance failure, 2 = input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Point2;
use serde::Deserialize;

use curvem::assembly::{AssembleConfig, InterfaceStabilization, OwnerPolicy};
use curvem::geometry::{diagnostics, Mesh, ParamWarp, QuadConfig};
use curvem::io::{field_to_json, mesh_from_json, mesh_to_json, rate_table_csv};
use curvem::meshgen::{
    disk_boundary, square_circle_interface, square_straight, DiskBoundary, InterfaceGeometry,
    InterfaceMeshOptions,
};
use curvem::post::{convergence_study, error_norms, patch_test_error, solve_problem};
use curvem::problem::{
    interface_jump_problem, patch_poly, smooth_sin_problem, ProblemData,
};
use curvem::solver::SolverKind;
use curvem::Error;

#[derive(Parser)]
#[command(
    name = "curvem",
    about = "Virtual element method on polygonal meshes with curved edges"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify exact reproduction of polynomial solutions on a curved
    /// interface mesh (exit 1 when the error exceeds 1e-8).
    PatchTest(PatchArgs),
    /// Run a refinement study and emit a CSV rate table.
    Convergence(ConvArgs),
    /// Solve one problem and dump the per-element solution field.
    Solve(SolveArgs),
    /// Print mesh diagnostics (sizes, shape-regularity ratios).
    MeshInfo(MeshSourceArgs),
    /// Generate a built-in mesh and write it as curvem-mesh/1 JSON.
    GenMesh(GenArgs),
}

/// Config-file overridable values; flags win over the file.
#[derive(Deserialize, Default, Debug)]
struct FileConfig {
    version: Option<u32>,
    k: Option<usize>,
    n: Option<usize>,
    radius: Option<f64>,
    case: Option<String>,
    levels: Option<Vec<usize>>,
    stabilization: Option<String>,
    owner_policy: Option<String>,
    solver: Option<String>,
    curved_quad_points: Option<usize>,
    kappa_in: Option<f64>,
    kappa_out: Option<f64>,
    rho: Option<f64>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, Error> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            let cfg: FileConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad config {}: {e}", p.display())))?;
            match cfg.version {
                Some(1) | None => Ok(cfg),
                Some(v) => Err(Error::Config(format!("unsupported config version {v}"))),
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StabMode {
    OneSided,
    TwoSided,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    SmallerId,
    LargerKappa,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Cg,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Polynomial order (1..=3).
    #[arg(short)]
    k: Option<usize>,
    #[arg(long)]
    stabilization: Option<StabMode>,
    #[arg(long)]
    owner_policy: Option<PolicyArg>,
    #[arg(long)]
    solver: Option<SolverArg>,
    /// Override the Gauss point count on curved edges.
    #[arg(long)]
    curved_quad_points: Option<usize>,
}

impl CommonArgs {
    fn assemble_config(&self, file: &FileConfig, k: usize) -> Result<AssembleConfig, Error> {
        let mut cfg = AssembleConfig::new(k);
        let stab = match (&self.stabilization, file.stabilization.as_deref()) {
            (Some(StabMode::OneSided), _) => InterfaceStabilization::OneSidedOnJumps,
            (Some(StabMode::TwoSided), _) => InterfaceStabilization::TwoSided,
            (None, Some("one-sided")) => InterfaceStabilization::OneSidedOnJumps,
            (None, Some("two-sided")) => InterfaceStabilization::TwoSided,
            (None, Some(other)) => {
                return Err(Error::Config(format!("unknown stabilization {other:?}")))
            }
            (None, None) => InterfaceStabilization::OneSidedOnJumps,
        };
        let policy = match (&self.owner_policy, file.owner_policy.as_deref()) {
            (Some(PolicyArg::SmallerId), _) => OwnerPolicy::SmallerId,
            (Some(PolicyArg::LargerKappa), _) => OwnerPolicy::LargerKappa,
            (None, Some("smaller-id")) => OwnerPolicy::SmallerId,
            (None, Some("larger-kappa")) => OwnerPolicy::LargerKappa,
            (None, Some(other)) => {
                return Err(Error::Config(format!("unknown owner policy {other:?}")))
            }
            (None, None) => OwnerPolicy::SmallerId,
        };
        cfg.stab_mode = stab;
        cfg.owner_policy = policy;
        if let Some(p) = self.curved_quad_points.or(file.curved_quad_points) {
            if p < 2 {
                return Err(Error::Config("curved_quad_points must be >= 2".into()));
            }
            cfg.quad.curved_edge_points = p;
        }
        Ok(cfg)
    }

    fn solver_kind(&self, file: &FileConfig) -> Result<SolverKind, Error> {
        Ok(match (&self.solver, file.solver.as_deref()) {
            (Some(SolverArg::Direct), _) | (None, Some("direct")) | (None, None) => {
                SolverKind::Direct
            }
            (Some(SolverArg::Cg), _) | (None, Some("cg")) => SolverKind::ConjugateGradient,
            (None, Some(other)) => {
                return Err(Error::Config(format!("unknown solver {other:?}")))
            }
        })
    }
}

#[derive(Args)]
struct MeshSourceArgs {
    /// Read a curvem-mesh/1 file.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Built-in generator: square | square-circle-interface | disk.
    #[arg(long)]
    gen: Option<String>,
    /// Refinement parameter of the generator.
    #[arg(long)]
    n: Option<usize>,
    /// Interface radius (square-circle-interface).
    #[arg(long)]
    radius: Option<f64>,
    /// Disk boundary tagging: dirichlet | robin | mixed.
    #[arg(long)]
    boundary: Option<String>,
    /// kappa inside the interface circle.
    #[arg(long)]
    kappa_in: Option<f64>,
    /// kappa outside the interface circle.
    #[arg(long)]
    kappa_out: Option<f64>,
    /// Tag the top side of the square Robin.
    #[arg(long, default_value_t = false)]
    robin_top: bool,
    /// Reparametrize every arc by the cubic warp.
    #[arg(long, default_value_t = false)]
    warp_cubic: bool,
    /// Replace interface arcs by chords: arcs | chords-curved | chords-straight.
    #[arg(long)]
    interface_geometry: Option<String>,
}

impl MeshSourceArgs {
    fn build(&self, file: &FileConfig, quad: &QuadConfig) -> Result<Mesh, Error> {
        if let Some(path) = &self.mesh {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            return mesh_from_json(&text, quad);
        }
        let name = self
            .gen
            .clone()
            .or(file.case.clone())
            .ok_or_else(|| Error::Config("need --mesh FILE or --gen NAME".into()))?;
        let n = self.n.or(file.n).unwrap_or(4);
        let warp = if self.warp_cubic {
            ParamWarp::Cubic
        } else {
            ParamWarp::Identity
        };
        match name.as_str() {
            "square" | "square-straight" => square_straight(n, 1.0, quad),
            "square-circle-interface" => {
                let geometry = match self.interface_geometry.as_deref() {
                    None | Some("arcs") => InterfaceGeometry::Arcs,
                    Some("chords-curved") => InterfaceGeometry::ChordsDeclaredCurved,
                    Some("chords-straight") => InterfaceGeometry::ChordsDeclaredStraight,
                    Some(other) => {
                        return Err(Error::Config(format!(
                            "unknown interface geometry {other:?}"
                        )))
                    }
                };
                let opts = InterfaceMeshOptions {
                    kappa_in: self.kappa_in.or(file.kappa_in).unwrap_or(1.0),
                    kappa_out: self.kappa_out.or(file.kappa_out).unwrap_or(1.0),
                    robin_top: self.robin_top,
                    geometry,
                    warp,
                };
                let r = self.radius.or(file.radius).unwrap_or(0.3);
                let (mesh, used) = square_circle_interface(n, r, &opts, quad)?;
                if (used - r).abs() > 0.0 {
                    eprintln!("note: interface radius jittered {r} -> {used}");
                }
                Ok(mesh)
            }
            "disk" | "disk-boundary" => {
                let tag = match self.boundary.as_deref() {
                    None | Some("dirichlet") => DiskBoundary::AllDirichlet,
                    Some("robin") => DiskBoundary::AllRobin,
                    Some("mixed") => DiskBoundary::MixedUpperRobin,
                    Some(other) => {
                        return Err(Error::Config(format!("unknown boundary tag {other:?}")))
                    }
                };
                disk_boundary(n, tag, 1.0, warp, quad)
            }
            other => Err(Error::Config(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Args)]
struct PatchArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    mesh: MeshSourceArgs,
    /// Negative control: perturb the trace generator points by this
    /// fraction of the chord (the test is expected to fail).
    #[arg(long, default_value_t = 0.0)]
    corrupt_tgp: f64,
}

#[derive(Args)]
struct ConvArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Built-in case: interface-jump | smooth-square | dirichlet-disk |
    /// robin-disk | neumann-disk.
    #[arg(long)]
    case: Option<String>,
    /// Refinement levels, e.g. 4,8,16,32
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    kappa_in: Option<f64>,
    #[arg(long)]
    kappa_out: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    mesh: MeshSourceArgs,
    /// Problem data: smooth | interface-jump | zero.
    #[arg(long, default_value = "smooth")]
    case: String,
    #[arg(long)]
    rho: Option<f64>,
    /// Field dump output path (curvem-field/1 JSON).
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    mesh: MeshSourceArgs,
    /// Output mesh path.
    #[arg(long)]
    out: PathBuf,
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::PatchTest(args) => cmd_patch_test(args),
        Cmd::Convergence(args) => cmd_convergence(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::MeshInfo(args) => cmd_mesh_info(args),
        Cmd::GenMesh(args) => cmd_gen_mesh(args),
    }
}

fn cmd_patch_test(args: PatchArgs) -> Result<bool, Error> {
    let file = load_config(&args.common.config)?;
    let ks: Vec<usize> = match args.common.k.or(file.k) {
        Some(k) => vec![k],
        None => vec![1, 2, 3],
    };
    let mut ok = true;
    for &k in &ks {
        let mut cfg = args.common.assemble_config(&file, k)?;
        cfg.tgp_perturbation = args.corrupt_tgp;
        let mesh = if args.mesh.mesh.is_none() && args.mesh.gen.is_none() {
            // default patch-test scenario: curved interface + Robin top
            let opts = InterfaceMeshOptions {
                robin_top: true,
                ..Default::default()
            };
            let n = args.mesh.n.or(file.n).unwrap_or(4);
            let r = args.mesh.radius.or(file.radius).unwrap_or(0.3);
            square_circle_interface(n, r, &opts, &cfg.quad)?.0
        } else {
            args.mesh.build(&file, &cfg.quad)?
        };
        let rho = file.rho.unwrap_or(1.0);
        let e = patch_test_error(&mesh, &patch_poly(k), rho, &cfg)?;
        let pass = e <= 1e-8;
        ok &= pass;
        println!(
            "patch-test k={k}: e_H1 = {e:.3e} [{}]",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(ok)
}

fn build_case(
    name: &str,
    radius: f64,
    kappa_in: f64,
    kappa_out: f64,
    rho: f64,
) -> Result<ProblemData, Error> {
    match name {
        "interface-jump" => Ok(interface_jump_problem(
            Point2::new(0.5, 0.5),
            radius,
            kappa_in,
            kappa_out,
        )),
        "smooth-square" | "smooth" | "dirichlet-disk" => Ok(smooth_sin_problem(kappa_in, rho)),
        "robin-disk" => Ok(smooth_sin_problem(kappa_in, rho)),
        "neumann-disk" => Ok(smooth_sin_problem(kappa_in, 0.0)),
        "zero" => Ok(ProblemData::zero()),
        other => Err(Error::Config(format!("unknown case {other:?}"))),
    }
}

fn cmd_convergence(args: ConvArgs) -> Result<bool, Error> {
    let file = load_config(&args.common.config)?;
    let k = args.common.k.or(file.k).unwrap_or(1);
    let cfg = args.common.assemble_config(&file, k)?;
    let solver = args.common.solver_kind(&file)?;
    let case = args
        .case
        .clone()
        .or(file.case.clone())
        .unwrap_or_else(|| "interface-jump".into());
    let levels = if args.levels.is_empty() {
        file.levels.clone().unwrap_or_else(|| vec![4, 8, 16, 32])
    } else {
        args.levels.clone()
    };
    let kappa_in = args.kappa_in.or(file.kappa_in).unwrap_or(1.0);
    let kappa_out = args.kappa_out.or(file.kappa_out).unwrap_or(if case == "interface-jump" {
        100.0
    } else {
        1.0
    });
    let rho = args.rho.or(file.rho).unwrap_or(1.0);
    let r0 = args.radius.or(file.radius).unwrap_or(0.3);

    let mut meshes = Vec::new();
    let mut radius = r0;
    for &n in &levels {
        match case.as_str() {
            "interface-jump" => {
                let opts = InterfaceMeshOptions {
                    kappa_in,
                    kappa_out,
                    ..Default::default()
                };
                let (m, used) = square_circle_interface(n, r0, &opts, &cfg.quad)?;
                radius = used;
                meshes.push(m);
            }
            "smooth-square" | "smooth" => meshes.push(square_straight(n, kappa_in, &cfg.quad)?),
            "dirichlet-disk" => meshes.push(disk_boundary(
                n,
                DiskBoundary::AllDirichlet,
                kappa_in,
                ParamWarp::Identity,
                &cfg.quad,
            )?),
            "robin-disk" | "neumann-disk" => meshes.push(disk_boundary(
                n,
                DiskBoundary::MixedUpperRobin,
                kappa_in,
                ParamWarp::Identity,
                &cfg.quad,
            )?),
            other => return Err(Error::Config(format!("unknown case {other:?}"))),
        }
    }
    let rho = if case == "neumann-disk" { 0.0 } else { rho };
    let problem = build_case(&case, radius, kappa_in, kappa_out, rho)?;
    let study = convergence_study(&meshes, &problem, &cfg, solver)?;
    let csv = rate_table_csv(&study.rows);
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    eprintln!(
        "case {case} k={k}: observed H1 slope {:.3}, L2 slope {:.3}",
        study.slope_h1, study.slope_l2
    );
    Ok(study.slope_h1 >= k as f64 - 0.2)
}

fn cmd_solve(args: SolveArgs) -> Result<bool, Error> {
    let file = load_config(&args.common.config)?;
    let k = args.common.k.or(file.k).unwrap_or(1);
    let cfg = args.common.assemble_config(&file, k)?;
    let solver = args.common.solver_kind(&file)?;
    let mesh = args.mesh.build(&file, &cfg.quad)?;
    let rho = args.rho.or(file.rho).unwrap_or(1.0);
    let kappa_in = mesh.kappa.values().next().copied().unwrap_or(1.0);
    let problem = build_case(&args.case, 0.3, kappa_in, kappa_in, rho)?;
    let run = solve_problem(&mesh, &problem, &cfg, solver)?;
    println!(
        "solved: {} free dofs, relative residual {:.2e}{}",
        run.system.dof_map.n_free,
        run.report.rel_residual,
        run.report
            .iterations
            .map(|n| format!(", {n} CG iterations"))
            .unwrap_or_default()
    );
    if let Some(exact) = &problem.exact {
        let rep = error_norms(&mesh, &run.system, &run.solution, exact)?;
        println!("errors: e_H1 = {:.3e}, e_L2 = {:.3e}", rep.e_h1, rep.e_l2);
    }
    if let Some(path) = &args.field {
        std::fs::write(path, field_to_json(&mesh, &run.system, &run.solution)?)?;
        println!("field dump written to {}", path.display());
    }
    Ok(true)
}

fn cmd_mesh_info(args: MeshSourceArgs) -> Result<bool, Error> {
    let quad = QuadConfig::for_order(2);
    let mesh = args.build(&FileConfig::default(), &quad)?;
    let d = diagnostics(&mesh);
    println!("{}", serde_json::to_string_pretty(&d).map_err(Error::from)?);
    // assumption diagnostics: A needs a star center and healthy rho ratio,
    // B a healthy shortest-edge ratio
    if d.elements_without_star_center > 0 {
        eprintln!(
            "warning: {} element(s) without a valid star center",
            d.elements_without_star_center
        );
    }
    if d.min_edge_ratio < 0.05 {
        eprintln!(
            "warning: shortest edge ratio {:.3e} is small (assumption B at risk)",
            d.min_edge_ratio
        );
    }
    Ok(true)
}

fn cmd_gen_mesh(args: GenArgs) -> Result<bool, Error> {
    let quad = QuadConfig::for_order(2);
    let mesh = args.mesh.build(&FileConfig::default(), &quad)?;
    std::fs::write(&args.out, mesh_to_json(&mesh)?)?;
    println!("mesh written to {}", args.out.display());
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Io(_) | Error::Mesh(_) | Error::Contract(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
