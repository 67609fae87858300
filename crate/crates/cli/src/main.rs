//! `creutz`: command-line front end for the Creutz ladder library.
//!
//! Exit codes: 0 success, 2 invalid usage or parameters, 3 the requested
//! computation is undefined at that point (metallic system, no edge mode...),
//! 1 anything else (I/O).

// `!(x > y)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod grammar;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use creutz::dynamics::{breathing_half_period, cage_support, evolve, time_grid};
use creutz::effective::{
    compare_effective_vs_full, doublon_projector, effective_doublon_hamiltonian, effective_doublon_hamiltonian_with,
    EffectiveTerms,
};
use creutz::hubbard::{
    fock_to_first_quant, two_particle_evolve, two_particle_hamiltonian, FockState, TwoParticleBasis,
};
use creutz::lattice::single_particle_hamiltonian;
use creutz::linalg::{eigh, eigvalsh, CVector};
use creutz::mapping2d::{build_2d_hamiltonian, evolve_2d, mapping_check, zeta_layout};
use creutz::states::{doublon_edge_state, edge_state, noon_state, StateVector};
use creutz::topology::{classify_phase, phase_diagram_scan, probed_gap, zak_phase, Band, PhaseKind};
use creutz::{io, Boundary, LatticeParams, SiteIndex, C64};

use config::{pick, usage, Config, UsageError};
use grammar::{parse_angle, parse_init, Factor, Init};

#[derive(Parser, Debug)]
#[command(name = "creutz", version, about = "Creutz and two-boson Creutz-Hubbard ladder simulations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug)]
struct Common {
    /// `key = value` file with defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of rungs.
    #[arg(long = "L", global = true)]
    l: Option<usize>,
    /// Leg and diagonal hopping.
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    j: Option<f64>,
    /// Rung hopping.
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<f64>,
    /// Flux phase: `pi`, `pi/2`, `-3pi/2` or radians.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    phi: Option<f64>,
    /// On-site interaction.
    #[arg(long = "U", global = true, allow_hyphen_values = true)]
    u: Option<f64>,
    /// Boundary condition.
    #[arg(long, global = true)]
    bc: Option<Bc>,
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Print the resolved lattice configuration as a config file and exit.
    #[arg(long, global = true)]
    echo_config: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sorted eigenvalues of one of the Hamiltonians.
    Spectrum {
        #[arg(long)]
        model: Option<Model>,
        /// Also write the eigenvectors.
        #[arg(long)]
        vectors: bool,
        /// Effective model only: drop the uniform `U + Delta` doublon offset.
        #[arg(long)]
        no_offset: bool,
    },
    /// Zak phase and winding number of the bulk bands.
    Zak {
        #[arg(long)]
        band: Option<BandArg>,
        /// Quasimomentum samples.
        #[arg(long)]
        nk: Option<usize>,
    },
    /// Phase classification on an `m x phi` grid.
    PhaseDiagram {
        /// Points along each axis.
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        nk: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        m_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        m_max: Option<f64>,
    },
    /// Exact time evolution of an initial state.
    Evolve {
        #[arg(long)]
        model: Option<Model>,
        /// site:j,leg | doublon:j,leg | edge:left|right | doublon-edge:left|right |
        /// noon | product:edgeL,site:j,leg | file:<path>
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        tmax: Option<f64>,
        /// Number of time steps; `samples + 1` times are written.
        #[arg(long)]
        samples: Option<usize>,
        /// `2d` writes the product-lattice occupancy instead.
        #[arg(long)]
        space: Option<Space>,
        /// Occupation threshold for the reported support set.
        #[arg(long)]
        support_eps: Option<f64>,
    },
    /// Effective doublon model against the full two-boson dynamics.
    EffectiveCompare {
        /// doublon:j,leg | doublon-edge:left|right | noon | file:<path>
        #[arg(long)]
        init: Option<String>,
        /// Defaults to `10 U / J^2`.
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Equivalence of the product lattice with the two-boson problem.
    Map2dCheck,
    /// Bond list of the product lattice stacked along the leg-pair axis.
    Layout {
        /// Close the leg-pair axis into a ring.
        #[arg(long)]
        periodic_zeta: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Bc {
    Open,
    Periodic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    Single,
    #[value(alias = "two-particle")]
    Two,
    Effective,
    Map2d,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Space {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BandArg {
    Lower,
    Upper,
}

fn enum_value<E: ValueEnum>(s: &str) -> Result<E, String> {
    E::from_str(s, true)
}

/// Everything a subcommand needs: the lattice plus the merged settings.
struct Run {
    params: LatticeParams,
    config: Config,
    format: Option<Format>,
    out: Option<PathBuf>,
}

impl Run {
    fn format(&self, default: Format) -> Result<Format> {
        Ok(pick(self.format, self.config.with("format", enum_value)?, default))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn lattice(common: &Common, config: &Config) -> Result<LatticeParams> {
    let l = pick(common.l, config.get("L")?, 6);
    let j = pick(common.j, config.get("J")?, 1.0);
    let m = pick(common.m, config.get("m")?, 0.0);
    let phi = pick(common.phi, config.with("phi", parse_angle)?, std::f64::consts::PI);
    let u = pick(common.u, config.get("U")?, 0.0);
    let bc = match pick(common.bc, config.with("bc", enum_value)?, Bc::Open) {
        Bc::Open => Boundary::Open,
        Bc::Periodic => Boundary::Periodic,
    };
    Ok(LatticeParams::new(l, j, m, phi, u, bc)?)
}

fn echo_config(p: &LatticeParams) -> String {
    let bc = match p.boundary() {
        Boundary::Open => "open",
        Boundary::Periodic => "periodic",
    };
    format!(
        "L = {}\nJ = {}\nm = {}\nphi = {}\nU = {}\nbc = {}\n",
        p.l(),
        io::fmt_num(p.j()),
        io::fmt_num(p.m()),
        io::fmt_num(p.phi()),
        io::fmt_num(p.u()),
        bc
    )
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("CREUTZ_THREADS") else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("CREUTZ_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.downcast_ref::<UsageError>().is_some() {
                2
            } else if let Some(e) = err.downcast_ref::<creutz::Error>() {
                if e.is_domain() {
                    3
                } else {
                    2
                }
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let config = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let params = lattice(&cli.common, &config)?;
    let run = Run { params, config, format: cli.common.format, out: cli.common.out.clone() };
    if cli.common.echo_config {
        return run.emit(&echo_config(&run.params));
    }
    match cli.command {
        Command::Spectrum { model, vectors, no_offset } => cmd_spectrum(&run, model, vectors, no_offset),
        Command::Zak { band, nk } => cmd_zak(&run, band, nk),
        Command::PhaseDiagram { res, nk, m_min, m_max } => cmd_phase_diagram(&run, res, nk, m_min, m_max),
        Command::Evolve { model, init, tmax, samples, space, support_eps } => {
            cmd_evolve(&run, model, init, tmax, samples, space, support_eps)
        }
        Command::EffectiveCompare { init, tmax, samples } => cmd_effective_compare(&run, init, tmax, samples),
        Command::Map2dCheck => cmd_map2d_check(&run),
        Command::Layout { periodic_zeta } => cmd_layout(&run, periodic_zeta),
    }
}

fn cmd_spectrum(run: &Run, model: Option<Model>, vectors: bool, no_offset: bool) -> Result<()> {
    let p = &run.params;
    let model = pick(model, run.config.with("model", enum_value)?, Model::Single);
    let vectors = vectors || run.config.get::<bool>("vectors")?.unwrap_or(false);
    let offset = !(no_offset || run.config.get::<bool>("no-offset")?.unwrap_or(false));
    let (name, h) = match model {
        Model::Single => ("single", single_particle_hamiltonian(p)),
        Model::Two => ("two", two_particle_hamiltonian(p)),
        Model::Effective => {
            ("effective", effective_doublon_hamiltonian_with(p, EffectiveTerms { offset, ..Default::default() })?)
        }
        Model::Map2d => ("map2d", build_2d_hamiltonian(p)),
    };
    let text = if vectors {
        let s = eigh(&h)?;
        io::spectrum_json(name, p, &s.values, Some(&s.vectors))
    } else {
        io::spectrum_json(name, p, &eigvalsh(&h)?, None)
    };
    run.emit(&text)
}

fn cmd_zak(run: &Run, band: Option<BandArg>, nk: Option<usize>) -> Result<()> {
    let p = &run.params;
    let nk = pick(nk, run.config.get("nk")?, 256);
    let band = match pick(band, run.config.with("band", enum_value)?, BandArg::Lower) {
        BandArg::Lower => Band::Lower,
        BandArg::Upper => Band::Upper,
    };
    let mut c = classify_phase(p, nk);
    if c.kind == PhaseKind::Metallic {
        return Err(creutz::Error::MetallicSystem(probed_gap(p)).into());
    }
    c.zak = Some(zak_phase(p, band, nk)?);
    run.emit(&io::classification_json(p, &c))
}

fn cmd_phase_diagram(
    run: &Run,
    res: Option<usize>,
    nk: Option<usize>,
    m_min: Option<f64>,
    m_max: Option<f64>,
) -> Result<()> {
    let p = &run.params;
    let res = pick(res, run.config.get("res")?, 81);
    let nk = pick(nk, run.config.get("nk")?, 128);
    let m_range = (pick(m_min, run.config.get("m-min")?, -3.0), pick(m_max, run.config.get("m-max")?, 3.0));
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = phase_diagram_scan(p, m_range, (-two_pi, two_pi), (res, res), nk)?;
    match run.format(Format::Csv)? {
        Format::Csv => run.emit(&io::phase_diagram_csv(&d)),
        Format::Json => run.emit(&io::phase_diagram_json(p, &d)),
    }
}

fn read_amplitudes(path: &Path, expected: usize) -> Result<CVector<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read `{}`: {e}", path.display())))?;
    let raw: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("`{}` is not a JSON list of [re, im] pairs: {e}", path.display())))?;
    if raw.len() != expected {
        return Err(usage(format!("`{}` holds {} amplitudes, expected {expected}", path.display(), raw.len())));
    }
    let v = CVector::from_iterator(expected, raw.iter().map(|[re, im]| C64::new(*re, *im)));
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(usage(format!("`{}` has no weight", path.display())));
    }
    Ok(v / C64::new(n, 0.0))
}

fn check_site(p: &LatticeParams, s: SiteIndex) -> Result<()> {
    if s.j > p.l() {
        return Err(usage(format!("site {s} lies outside the ladder of {} rungs", p.l())));
    }
    Ok(())
}

fn single_state(p: &LatticeParams, init: &Init) -> Result<CVector<f64>> {
    Ok(match init {
        Init::Site(s) => {
            check_site(p, *s)?;
            StateVector::site(p.l(), *s)?.into_amplitudes()
        }
        Init::Edge(side) => edge_state(p, *side)?.into_amplitudes(),
        Init::File(path) => read_amplitudes(path, p.n_sites())?,
        other => return Err(usage(format!("initial state {other:?} needs --model two"))),
    })
}

fn factor_state(p: &LatticeParams, f: Factor) -> Result<CVector<f64>> {
    match f {
        Factor::Edge(side) => single_state(p, &Init::Edge(side)),
        Factor::Site(s) => single_state(p, &Init::Site(s)),
    }
}

fn fock_state(p: &LatticeParams, init: &Init) -> Result<FockState<f64>> {
    let basis = TwoParticleBasis::for_ladder(p.l());
    Ok(match init {
        Init::Doublon(s) => {
            check_site(p, *s)?;
            FockState::doublon(basis, s.linear())?
        }
        Init::DoublonEdge(side) => doublon_edge_state(p, *side)?,
        Init::Noon => noon_state(p)?,
        Init::Product(a, b) => FockState::product(basis, &factor_state(p, *a)?, &factor_state(p, *b)?)?,
        Init::File(path) => FockState::new(basis, read_amplitudes(path, basis.dim())?)?,
        other => return Err(usage(format!("initial state {other:?} is a single-particle state; use --model single"))),
    })
}

/// Doublon-subspace amplitudes for the effective model.
fn doublon_state(p: &LatticeParams, init: &Init) -> Result<CVector<f64>> {
    if let Init::File(path) = init {
        return read_amplitudes(path, p.n_sites());
    }
    if !matches!(init, Init::Doublon(_) | Init::DoublonEdge(_) | Init::Noon) {
        return Err(usage(format!("initial state {init:?} is not a doublon state")));
    }
    let fock = fock_state(p, init)?;
    Ok(doublon_projector(fock.basis()).project_state(&fock))
}

fn nearest_neighbour(p: &LatticeParams, s: SiteIndex) -> Option<SiteIndex> {
    if s.j < p.l() {
        Some(SiteIndex::new(s.j + 1, s.leg))
    } else if s.j > 1 {
        Some(SiteIndex::new(s.j - 1, s.leg))
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    run: &Run,
    model: Option<Model>,
    init: Option<String>,
    tmax: Option<f64>,
    samples: Option<usize>,
    space: Option<Space>,
    support_eps: Option<f64>,
) -> Result<()> {
    let p = &run.params;
    let model = pick(model, run.config.with("model", enum_value)?, Model::Single);
    let init_text = pick(init, run.config.raw("init").map(str::to_string), "site:3,A".to_string());
    let init = parse_init(&init_text).map_err(usage)?;
    let tmax = pick(tmax, run.config.get("tmax")?, 10.0);
    let samples = pick(samples, run.config.get("samples")?, 1000);
    let space = pick(space, run.config.with("space", enum_value)?, Space::OneD);
    let eps = pick(support_eps, run.config.get("support-eps")?, 1e-10);
    if !(tmax > 0.0) || !tmax.is_finite() || samples == 0 {
        return Err(usage("tmax must be positive and samples at least 1"));
    }
    let times = time_grid(tmax, samples);

    if space == Space::TwoD {
        if model != Model::Two {
            return Err(usage("--space 2d needs --model two"));
        }
        let fock = fock_state(p, &init)?;
        let traj = evolve_2d(p, &fock_to_first_quant(&fock), &times)?.with_meta(*p, init_text);
        return run.emit(&io::occupancy2d_json(&traj));
    }

    let traj = match model {
        Model::Single => {
            let psi = single_state(p, &init)?;
            let traj = evolve(&single_particle_hamiltonian(p), &psi, &times)?;
            if let Init::Site(s) = init {
                if let Some(n) = nearest_neighbour(p, s) {
                    if let Ok(t) = breathing_half_period(&traj, n) {
                        eprintln!("first occupation minimum of {n}: t = {t:.6}");
                    }
                }
            }
            traj
        }
        Model::Two => two_particle_evolve(p, &fock_state(p, &init)?, &times)?,
        Model::Effective => evolve(&effective_doublon_hamiltonian(p)?, &doublon_state(p, &init)?, &times)?,
        Model::Map2d => return Err(usage("use --model two --space 2d for product-lattice evolution")),
    };
    let traj = traj.with_meta(*p, init_text);
    let support = cage_support(&traj, eps);
    match run.format(Format::Json)? {
        Format::Json => run.emit(&io::trajectory_json(&traj, &support)),
        Format::Csv => run.emit(&io::trajectory_csv(&traj)),
    }
}

fn cmd_effective_compare(run: &Run, init: Option<String>, tmax: Option<f64>, samples: Option<usize>) -> Result<()> {
    let p = &run.params;
    if !(p.u() > 0.0) {
        return Err(creutz::Error::InvalidParameter {
            field: "U",
            reason: "the effective doublon model needs U > 0".into(),
        }
        .into());
    }
    let init_text = pick(init, run.config.raw("init").map(str::to_string), "doublon:3,A".to_string());
    let init = parse_init(&init_text).map_err(usage)?;
    let tmax = pick(tmax, run.config.get("tmax")?, 10.0 * p.u() / (p.j() * p.j()));
    let samples = pick(samples, run.config.get("samples")?, 2000);
    if !(tmax > 0.0) || !tmax.is_finite() || samples == 0 {
        return Err(usage("tmax must be positive and samples at least 1"));
    }
    let psi = doublon_state(p, &init)?;
    let series = compare_effective_vs_full(p, &psi, &time_grid(tmax, samples))?;
    if series.outside_validity {
        eprintln!(
            "warning: U = {} is below 10 J; the second-order effective model is not expected to be accurate",
            p.u()
        );
    }
    eprintln!("min fidelity {:.6}, max leakage {:.6}", series.min_fidelity(), series.max_leakage());
    match run.format(Format::Csv)? {
        Format::Csv => run.emit(&io::fidelity_csv(&series)),
        Format::Json => run.emit(&io::fidelity_json(p, &series)),
    }
}

fn cmd_map2d_check(run: &Run) -> Result<()> {
    let p = &run.params;
    if p.l() > 10 {
        return Err(usage(format!("map2d-check is limited to L <= 10, got {}", p.l())));
    }
    run.emit(&io::mapping_check_json(p, &mapping_check(p)?))
}

fn cmd_layout(run: &Run, periodic_zeta: bool) -> Result<()> {
    let p = &run.params;
    let periodic_zeta = periodic_zeta || run.config.get::<bool>("periodic-zeta")?.unwrap_or(false);
    let layout = zeta_layout(p, periodic_zeta);
    eprintln!("nonlocal bonds per unit cell: {}", layout.nonlocal_per_cell);
    match run.format(Format::Csv)? {
        Format::Csv => run.emit(&io::bonds_csv(&layout)),
        Format::Json => run.emit(&io::layout_json(p, &layout)),
    }
}
