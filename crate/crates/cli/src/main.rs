use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cartanlg::curves::{curve_from_j, local_scan, parse_rational};
use cartanlg::genus::{exceptional_genus, with_scalars};
use cartanlg::inertia::{congruence, surjective_det_possible};
use cartanlg::localglobal::{verify_groups, CaseRecord, VerificationReport, CASE_COLUMNS};
use cartanlg::mat::parse_generators;
use cartanlg::subgrp::{
    enumerate_local_candidates, read_cache, write_cache, EnumConfig, Exceptional,
};
use cartanlg::{
    classify, closure, exceptional_bound, feasible_exceptional_primes, genus_of_modular_curve,
    pgl_type, standard_group, BoundQuery, Error, GenusProfile, ImageType, PrimeField,
    StandardTarget, Subgroup,
};

#[derive(Parser)]
#[command(
    name = "cartanlg",
    version,
    about = "Local-global checks for Cartan subgroups of GL2(F_l)"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for subgroup enumeration caches.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the group generated by the given matrices.
    Classify {
        #[arg(long)]
        ell: u64,
        /// Comma-separated `a:b:c:d` matrices.
        #[arg(long)]
        gens: String,
        #[arg(long, value_parser = parse_target)]
        target: StandardTarget,
    },
    /// Enumerate every locally-T group at l and classify each one.
    Verify {
        #[arg(long)]
        ell: u64,
        #[arg(long, value_parser = parse_target)]
        target: StandardTarget,
        #[arg(long)]
        require_surjective_det: bool,
    },
    /// Test Frobenius traces of the curve with j-invariant J against T.
    Scan {
        #[arg(long)]
        j: String,
        #[arg(long)]
        ell: u64,
        #[arg(long, value_parser = parse_target)]
        target: StandardTarget,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
    },
    /// Genus of the modular curve attached to an exceptional image or a normalizer.
    Genus {
        #[arg(long)]
        ell: u64,
        #[arg(long = "type", value_enum)]
        kind: CurveType,
    },
    /// Bound on l for an exceptional or Klein-four image over a degree-d field.
    Bound {
        #[arg(long)]
        degree: u64,
        #[arg(long, value_parser = parse_image)]
        image: ImageType,
        #[arg(long, value_parser = parse_target)]
        target: Option<StandardTarget>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveType {
    #[value(name = "A4")]
    A4,
    #[value(name = "S4")]
    S4,
    #[value(name = "A5")]
    A5,
    #[value(name = "Nsp")]
    Nsp,
    #[value(name = "Nns")]
    Nns,
}

impl CurveType {
    fn name(self) -> &'static str {
        match self {
            CurveType::A4 => "A4",
            CurveType::S4 => "S4",
            CurveType::A5 => "A5",
            CurveType::Nsp => "Nsp",
            CurveType::Nns => "Nns",
        }
    }
}

fn parse_target(s: &str) -> Result<StandardTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_image(s: &str) -> Result<ImageType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status with a message for stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(2, e.to_string())
    }
}

fn field(ell: u64) -> Result<PrimeField, Failure> {
    Ok(PrimeField::of(ell)?)
}

fn cartan_target(t: StandardTarget) -> Result<StandardTarget, Failure> {
    if t == StandardTarget::Borel {
        return Err(Error::UnsupportedTarget(t.to_string()).into());
    }
    Ok(t)
}

fn run_classify(fmt: Format, ell: u64, gens: &str, t: StandardTarget) -> Result<u8, Failure> {
    let f = field(ell)?;
    let t = cartan_target(t)?;
    let gens = parse_generators(gens, &f)?;
    if gens.is_empty() {
        return Err(Failure(2, "no generators given".into()));
    }
    let g = closure(&f, &gens)?;
    let case = classify(&f, &g, t)?;
    match fmt {
        Format::Text => {
            println!("order {} image {} target {t}", g.order(), pgl_type(&f, &g));
            println!("{case}");
        }
        Format::Machine => {
            println!("{CASE_COLUMNS}");
            println!("{}", CaseRecord::new(&f, t, &g, &case).to_line());
        }
    }
    Ok(if case.is_violation() { 1 } else { 0 })
}

fn cached_candidates(
    f: &PrimeField,
    t: StandardTarget,
    dir: Option<&Path>,
) -> Result<Vec<Subgroup>, Failure> {
    let io = |e: std::io::Error| Failure(2, format!("cache: {e}"));
    let Some(dir) = dir else {
        return Ok(enumerate_local_candidates(f, t, &EnumConfig::default())?.groups);
    };
    let path = dir.join(format!("{}-{}.csv", t, f.ell()));
    if path.exists() {
        let file = File::open(&path).map_err(io)?;
        return Ok(read_cache(BufReader::new(file), f, t)?);
    }
    let groups = enumerate_local_candidates(f, t, &EnumConfig::default())?.groups;
    std::fs::create_dir_all(dir).map_err(io)?;
    write_cache(
        BufWriter::new(File::create(&path).map_err(io)?),
        f,
        t,
        &groups,
    )
    .map_err(io)?;
    Ok(groups)
}

fn print_verification(fmt: Format, r: &VerificationReport) {
    match fmt {
        Format::Text => {
            println!(
                "l = {}, target {}: {} groups",
                r.ell, r.target, r.groups_examined
            );
            for (case, n) in &r.cases {
                println!("  {n:>4}  {case}");
            }
            for w in r.witnesses() {
                let gens: Vec<String> = w.generators.iter().map(|g| g.to_string()).collect();
                println!(
                    "  {} order {} image {}: <{}>",
                    w.tag,
                    w.order,
                    w.pgl_type,
                    gens.join(", ")
                );
            }
            for gens in &r.lemma_failures {
                let gens: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                println!(
                    "  in a split normalizer, in no single nonsplit normalizer: <{}>",
                    gens.join(", ")
                );
            }
            println!("violations {}", r.violations());
        }
        Format::Machine => {
            println!("{CASE_COLUMNS}");
            for rec in &r.records {
                println!("{}", rec.to_line());
            }
        }
    }
}

fn run_verify(
    fmt: Format,
    cache: Option<&Path>,
    ell: u64,
    t: StandardTarget,
    surj: bool,
) -> Result<u8, Failure> {
    let f = field(ell)?;
    let t = cartan_target(t)?;
    let groups = cached_candidates(&f, t, cache)?;
    let report = verify_groups(&f, t, &groups, surj)?;
    print_verification(fmt, &report);
    Ok(if report.is_clean() { 0 } else { 1 })
}

fn run_scan(fmt: Format, j: &str, ell: u64, t: StandardTarget, pmax: u64) -> Result<u8, Failure> {
    let f = field(ell)?;
    let t = cartan_target(t)?;
    let e = curve_from_j(&parse_rational(j)?);
    let report = local_scan(&e, &f, t, pmax)?;
    match fmt {
        Format::Text => {
            let s = report.summary();
            println!("j = {j}");
            println!("y^2 = x^3 + ({})x + ({})", e.a, e.b);
            println!(
                "l = {ell}, target {t}, p <= {pmax}: {} good, {} bad primes",
                s.good, s.bad
            );
            match s.incompatible.first() {
                None => println!("consistent"),
                Some(p) => println!(
                    "inconsistent: {} primes, first p = {p}",
                    s.incompatible.len()
                ),
            }
        }
        Format::Machine => println!("{}", report.summary()),
    }
    Ok(if report.is_consistent() { 0 } else { 1 })
}

fn run_genus(fmt: Format, ell: u64, kind: CurveType) -> Result<u8, Failure> {
    let f = field(ell)?;
    let profile: GenusProfile = match kind {
        CurveType::A4 => exceptional_genus(f.ell(), Exceptional::A4)?,
        CurveType::S4 => exceptional_genus(f.ell(), Exceptional::S4)?,
        CurveType::A5 => exceptional_genus(f.ell(), Exceptional::A5)?,
        CurveType::Nsp | CurveType::Nns => {
            let t = if kind == CurveType::Nsp {
                StandardTarget::SplitNormalizer
            } else {
                StandardTarget::NonsplitNormalizer
            };
            genus_of_modular_curve(&f, &with_scalars(&f, &standard_group(&f, t)))?
        }
    };
    match fmt {
        Format::Text => println!("X_{}({ell}): {profile}", kind.name()),
        Format::Machine => {
            let p = profile;
            println!("ell,type,mu,nu2,nu3,nu_inf,g");
            println!(
                "{ell},{},{},{},{},{},{}",
                kind.name(),
                p.mu,
                p.nu2,
                p.nu3,
                p.nu_inf,
                p.g
            );
        }
    }
    Ok(0)
}

fn run_bound(
    fmt: Format,
    degree: u64,
    image: ImageType,
    target: Option<StandardTarget>,
) -> Result<u8, Failure> {
    let bound = exceptional_bound(BoundQuery::new(degree, image)?);
    let targets: Vec<StandardTarget> = match target {
        Some(t) => vec![cartan_target(t)?],
        None => StandardTarget::CARTAN_TYPES.to_vec(),
    };
    if fmt == Format::Machine {
        println!("degree,image,bound,target,modulus,residue,squares,primes");
    } else {
        println!("{image} over degree {degree}: l <= {bound}");
    }
    for t in targets {
        let primes = feasible_exceptional_primes(degree, image, t);
        let list: Vec<String> = primes.iter().map(u64::to_string).collect();
        match (fmt, congruence(image, t)) {
            (Format::Machine, Some((m, r, sq))) => {
                println!(
                    "{degree},{image},{bound},{t},{m},{r},{sq},{}",
                    list.join(";")
                )
            }
            (Format::Machine, None) => println!("{degree},{image},{bound},{t},,,,"),
            (Format::Text, Some((m, r, _))) => {
                let det = if surjective_det_possible(image, t) {
                    ""
                } else {
                    ", det in squares"
                };
                println!("  {t}: l = {r} mod {m}{det}: [{}]", list.join(", "));
            }
            (Format::Text, None) => println!("  {t}: no such case"),
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let fmt = cli.format;
    let outcome = match cli.command {
        Command::Classify { ell, gens, target } => run_classify(fmt, ell, &gens, target),
        Command::Verify {
            ell,
            target,
            require_surjective_det,
        } => run_verify(
            fmt,
            cli.cache.as_deref(),
            ell,
            target,
            require_surjective_det,
        ),
        Command::Scan {
            j,
            ell,
            target,
            pmax,
        } => run_scan(fmt, &j, ell, target, pmax),
        Command::Genus { ell, kind } => run_genus(fmt, ell, kind),
        Command::Bound {
            degree,
            image,
            target,
        } => run_bound(fmt, degree, image, target),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
