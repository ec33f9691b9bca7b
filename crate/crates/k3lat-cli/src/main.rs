//! `k3lat`: command-line front end for the verification suite and the
//! lattice catalog.

use clap::{Parser, Subcommand, ValueEnum};
use k3lat::catalog::{self, Name};
use k3lat::disc::{discriminant_form, level_sets, milgram_invariant, orbit_partition, Element, Isometry};
use k3lat::families::{self, NSDescriptor, Summand, Variant};
use k3lat::linalg::{rat_string, Rat};
use k3lat::report::{self, Status, VerifyOptions};
use k3lat::serial;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "k3lat", version, about = "Exact lattice checks for order-3 symplectic automorphisms of K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every verification check.
    VerifyAll {
        /// Write the JSON report to this path.
        #[arg(long, value_name = "PATH")]
        json: Option<std::path::PathBuf>,
        /// Comma-separated check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Largest degree used by the family checks.
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(i64).range(1..))]
        dmax: i64,
        /// JSON list of extra isometries for the orbit check.
        #[arg(long, value_name = "FILE")]
        gens: Option<std::path::PathBuf>,
        /// Treat inconclusive checks as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Named lattices.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Discriminant form of a catalog lattice.
    Disc {
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Index-3 overlattice of <2n> + K12 (side X) or <2n> + M (side Y).
    Classify {
        #[arg(long, ignore_case = true)]
        side: SideArg,
        #[arg(long)]
        degree: i64,
        #[arg(long)]
        json: bool,
    },
    /// Néron–Severi lattice of the quotient Y of a surface X in a family.
    QuotientNs {
        #[arg(long)]
        d: i64,
        #[arg(long, ignore_case = true)]
        variant: VariantArg,
        #[arg(long)]
        json: bool,
    },
    /// Tower of 3-isogenies starting at <2d> + K12.
    Tower {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        json: bool,
    },
    /// Orbits of isometries on the discriminant group of K12 or M.
    Orbits {
        #[arg(long, default_value = "K12")]
        lattice: OrbitLattice,
        /// JSON list of extra isometries.
        #[arg(long, value_name = "FILE")]
        gens: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// The explicit elliptic K3 surface with three IV* fibers.
    ExampleSurface {
        #[command(subcommand)]
        cmd: SurfaceCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List {
        #[arg(long)]
        json: bool,
    },
    Show {
        name: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum SurfaceCmd {
    Verify {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    X,
    Y,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Primed,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitLattice {
    #[value(name = "K12", alias = "k12")]
    K12,
    #[value(name = "M", alias = "m")]
    M,
}

/// Bad input (exit 2) versus a failed operation (exit 1).
enum Failure {
    Usage(String),
    Op(String),
}

type Outcome = Result<ExitCode, Failure>;

fn op<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Op(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Op(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::VerifyAll { json, only, dmax, gens, strict } => verify_all(json, only, dmax, gens, strict),
        Cmd::Catalog { cmd: CatalogCmd::List { json } } => catalog_list(json),
        Cmd::Catalog { cmd: CatalogCmd::Show { name, json } } => catalog_show(&name, json),
        Cmd::Disc { name, json } => disc(&name, json),
        Cmd::Classify { side, degree, json } => classify(side, degree, json),
        Cmd::QuotientNs { d, variant, json } => quotient_ns(d, variant, json),
        Cmd::Tower { d, height, json } => tower(d, height, json),
        Cmd::Orbits { lattice, gens, json } => orbits(lattice, gens, json),
        Cmd::ExampleSurface { cmd: SurfaceCmd::Verify { json } } => surface(json),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(v).map_err(op)?);
    Ok(())
}

fn parse_name(s: &str) -> Result<Name, Failure> {
    Name::parse(s).map_err(|e| Failure::Usage(e.to_string()))
}

/// Splits a generator file into isometries of `K12` and of `M`.
fn load_gens(path: &std::path::Path) -> Result<(Vec<Isometry>, Vec<Isometry>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let list = serial::parse_generator_file(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    let (k12, m) = (catalog::k12(), catalog::m_lattice());
    let mut out = (Vec::new(), Vec::new());
    for j in &list {
        match Name::parse(&j.lattice) {
            Ok(Name::K12) => out.0.push(serial::isometry_from_json(j, &k12).map_err(|e| Failure::Usage(e.to_string()))?),
            Ok(Name::M) => out.1.push(serial::isometry_from_json(j, &m).map_err(|e| Failure::Usage(e.to_string()))?),
            _ => return Err(Failure::Usage(format!("generator for unsupported lattice {:?}", j.lattice))),
        }
    }
    Ok(out)
}

fn verify_all(json: Option<std::path::PathBuf>, only: Vec<String>, dmax: i64, gens: Option<std::path::PathBuf>, strict: bool) -> Outcome {
    let (k12_generators, m_generators) = match &gens {
        Some(p) => load_gens(p)?,
        None => (Vec::new(), Vec::new()),
    };
    let opts = VerifyOptions { dmax, k12_generators, m_generators, only, threads: None };
    let r = report::verify_all(&opts).map_err(Failure::Usage)?;
    for c in &r.checks {
        let s = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        };
        println!("{:<28} {:<13} {:>8.2}s  {}", c.id, s, c.elapsed, c.paper_anchor);
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&r).map_err(op)?;
        std::fs::write(&path, text).map_err(|e| Failure::Op(format!("{}: {e}", path.display())))?;
    }
    Ok(ExitCode::from(r.exit_code(strict) as u8))
}

fn catalog_list(json: bool) -> Outcome {
    let mut rows = Vec::new();
    for name in Name::listing() {
        let inv = catalog::build(name).map_err(op)?.invariants().map_err(op)?;
        rows.push(json!({
            "name": name.to_string(),
            "rank": inv.rank,
            "signature": inv.signature,
            "abs_det": inv.abs_det.to_string(),
            "disc_divisors": inv.disc_divisors,
            "even": inv.even,
        }));
    }
    if json {
        print_json(&rows)?;
    } else {
        println!("{:<20} {:>4} {:>9} {:>8}  disc", "name", "rank", "sig", "|det|");
        for r in &rows {
            println!(
                "{:<20} {:>4} {:>9} {:>8}  {}",
                r["name"].as_str().unwrap_or_default(),
                r["rank"],
                format!("({},{})", r["signature"][0], r["signature"][1]),
                r["abs_det"].as_str().unwrap_or_default(),
                r["disc_divisors"],
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn catalog_show(name: &str, json: bool) -> Outcome {
    let name = parse_name(name)?;
    let nl = catalog::build(name).map_err(op)?;
    let j = serial::relative_to_json(&name.to_string(), &nl.lattice).map_err(op)?;
    if json {
        print_json(&j)?;
    } else {
        let inv = nl.invariants().map_err(op)?;
        println!("{name}: rank {}, signature {:?}, |det| {}, even {}", inv.rank, inv.signature, inv.abs_det, inv.even);
        println!("Gram:");
        for row in &j.gram {
            println!("  {}", row.iter().map(|x| format!("{x:>3}")).collect::<Vec<_>>().join(" "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn disc(name: &str, json: bool) -> Outcome {
    let name = parse_name(name)?;
    let nl = catalog::build(name).map_err(op)?;
    let d = discriminant_form(&nl.lattice).map_err(op)?;
    let f = d.form();
    let values: Vec<(String, usize)> = f.value_multiset().into_iter().map(|(k, v)| (rat_string(&k), v)).collect();
    let gauss = milgram_invariant(f).map_err(op)?;
    let w = json!({
        "lattice": name.to_string(),
        "divisors": f.divisors(),
        "order": f.order(),
        "q_values": values,
        "gauss_residue_mod_8": gauss,
        "generators": d.generators().iter().map(|g| g.iter().map(rat_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if json {
        print_json(&w)?;
    } else {
        println!("{name}: A = {}, |A| = {}, Gauss residue {gauss} mod 8", group_shape(f.divisors()), f.order());
        for (v, n) in values {
            println!("  q = {v:<6} {n}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn group_shape(divisors: &[i64]) -> String {
    if divisors.is_empty() {
        return "0".into();
    }
    divisors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
}

/// Writes `v` as an integer combination of labelled basis vectors.
fn combination(v: &[Rat], labels: &[String]) -> String {
    let mut s = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else if s.is_empty() { "" } else { "+" };
        let coeff = if mag.is_one() { String::new() } else { rat_string(&mag) };
        s.push_str(&format!("{sign}{coeff}{l}"));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn summand_labels(s: Summand) -> Vec<String> {
    match s {
        Summand::K12 => (1..=12).map(|i| format!("k{i}")).collect(),
        Summand::M => {
            let mut l = vec![String::new(); 12];
            for j in 1..=6 {
                for i in 1..=2 {
                    l[catalog::m_index(i, j)] = format!("m{i}{j}");
                }
            }
            l
        }
    }
}

fn classify(side: SideArg, degree: i64, json: bool) -> Outcome {
    if degree < 1 {
        return Err(Failure::Usage(format!("degree {degree} must be positive")));
    }
    let summand = match side {
        SideArg::X => Summand::K12,
        SideArg::Y => Summand::M,
    };
    let name = match side {
        SideArg::X => "K12",
        SideArg::Y => "M",
    };
    let c = families::classify_overlattice(summand, degree).map_err(op)?;
    let w = match &c {
        None => json!({ "lattice": format!("<{}>+{name}", 2 * degree), "exists": false }),
        Some(c) => {
            let g = combination(&c.g[1..], &summand_labels(summand));
            json!({
                "lattice": format!("<{}>+{name}", 2 * degree),
                "exists": true,
                "g": g,
                "q_glue": rat_string(&c.q_glue),
                "line_primitive": c.line_primitive,
                "summand_primitive": c.summand_primitive,
                "even": c.lattice.is_even(),
                "abs_det": rat_string(&c.lattice.det().abs()),
            })
        }
    };
    if json {
        print_json(&w)?;
    } else if let Some(c) = &c {
        println!("(<{}>+{name})': glue (L+g)/3", 2 * degree);
        println!("g = {}", w["g"].as_str().unwrap_or_default());
        println!("q(g/3) = {}, |det| = {}", rat_string(&c.q_glue), rat_string(&c.lattice.det().abs()));
    } else {
        println!("<{}>+{name} has no index-3 overlattice of the required shape (3 does not divide {degree})", 2 * degree);
    }
    Ok(ExitCode::SUCCESS)
}

fn quotient_ns(d: i64, variant: VariantArg, json: bool) -> Outcome {
    let desc = match variant {
        VariantArg::Plain => NSDescriptor::new(families::Side::X, Variant::Plain, d),
        VariantArg::Primed => NSDescriptor::new(families::Side::X, Variant::Primed, d),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let c = families::ns_of_quotient(desc).map_err(op)?;
    let w = json!({
        "source": desc.to_string(),
        "target": c.target.to_string(),
        "H_square": rat_string(&c.line_square),
        "index": c.index.to_string(),
        "shape_verified": c.shape_verified,
    });
    if json {
        print_json(&w)?;
    } else {
        println!("NS(X) = {desc}  ->  NS(Y) = {}, H^2 = {}", c.target, rat_string(&c.line_square));
    }
    Ok(if c.shape_verified { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn tower(d: i64, height: usize, json: bool) -> Outcome {
    if d < 1 || height == 0 {
        return Err(Failure::Usage("need d >= 1 and height >= 1".into()));
    }
    let rungs = families::isogeny_tower(d, height).map_err(op)?;
    let rows: Vec<Value> = rungs
        .iter()
        .map(|r| {
            json!({
                "level": r.level,
                "square": r.square,
                "x": r.x_shape.to_string(),
                "y": r.y_shape.to_string(),
                "genus_equal": r.genus_equal,
                "cover": r.cover.to_string(),
                "cover_ok": r.cover_ok,
            })
        })
        .collect();
    if json {
        print_json(&rows)?;
    } else {
        for r in &rungs {
            println!("{:>3}  H^2 = {:<8} X {:<14} Y {:<14} same genus: {}", r.level, r.square, r.x_shape.to_string(), r.y_shape.to_string(), r.genus_equal);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn orbits(lattice: OrbitLattice, gens: Option<std::path::PathBuf>, json: bool) -> Outcome {
    let (extra_k, extra_m) = match &gens {
        Some(p) => load_gens(p)?,
        None => (Vec::new(), Vec::new()),
    };
    let (l, isos) = match lattice {
        OrbitLattice::K12 => (catalog::k12(), report::k12_generators(&extra_k).map_err(Failure::Op)?.0),
        OrbitLattice::M => {
            let m = catalog::m_lattice();
            let mut isos = report::m_block_swaps().map_err(Failure::Op)?;
            isos.push(Isometry::negation("M", m.rank()));
            isos.extend(extra_m);
            (m, isos)
        }
    };
    let d = discriminant_form(&l).map_err(op)?;
    let acts: Vec<Vec<Element>> = isos.iter().map(|i| d.induced_action(i)).collect::<Result<_, _>>().map_err(op)?;
    let parts = orbit_partition(d.form(), &acts).map_err(op)?;
    let levels: Vec<(String, usize)> = level_sets(d.form()).iter().map(|(k, v)| (rat_string(k), v.len())).collect();
    let w = json!({
        "generators": isos.len(),
        "orbit_sizes": parts.sizes(),
        "orbit_values": parts.values.iter().map(rat_string).collect::<Vec<_>>(),
        "level_sets": levels,
        "verdict": format!("{:?}", parts.verdict(d.form())),
    });
    if json {
        print_json(&w)?;
    } else {
        println!("{} generators", isos.len());
        for (size, v) in parts.sizes().iter().zip(&parts.values) {
            println!("  orbit of size {size:<4} q = {}", rat_string(v));
        }
        println!("verdict: {}", w["verdict"].as_str().unwrap_or_default());
    }
    Ok(ExitCode::SUCCESS)
}

fn surface(json: bool) -> Outcome {
    let r = k3lat::surface::verify_example_surface().map_err(op)?;
    if json {
        print_json(&r)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&r).map_err(op)?);
    }
    Ok(if r.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
