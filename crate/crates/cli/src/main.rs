//! Command-line front end: classification, Gram data, kernels, witnesses,
//! reflections, the census, orientation counts and counting formulas.
//!
//! Exit codes: 0 on success, 1 on domain errors (the owning module's error
//! name goes to stderr), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use poset_gram::{
    anchored_path_at, census_detailed, classify_definiteness, count_cycle_orientations,
    count_nonnegative_a, count_path_orientations, count_principal_a, dynkin_type,
    enumerate_cycle_orientations, enumerate_path_orientations, evaluate_q, kernel_z_basis,
    normalize_hanging_paths, reflect, symmetric_gram, CensusRow, Definiteness,
    FullClassification, InputFormat, KernelBasis, OrientationCount, Poset,
};

#[derive(Parser)]
#[command(
    name = "poset-gram",
    version,
    about = "Exact spectral classification of finite posets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Definiteness, corank and Dynkin type of a poset.
    Classify(InputArgs),
    /// The doubled Gram matrix C + C^T and the rational Gram matrix G.
    Gram(InputArgs),
    /// Integer basis of the kernel lattice of a non-negative poset.
    Kernel(InputArgs),
    /// A vector with q(v) < 0, when one exists.
    Witness(InputArgs),
    /// Reverse one hanging path, or re-orient all of them outward.
    Reflect(ReflectArgs),
    /// Tabulate connected posets that become a path after one deletion.
    Census(CensusArgs),
    /// Brute-force orientation classes of the path and cycle on n points.
    Orient(SizeArgs),
    /// Closed-form counting table: N_P, N_C, N_tildeA, Nneg_A for 1..=n.
    Count(SizeArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Poset file: text cover list or JSON.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ReflectArgs {
    /// Poset file: text cover list or JSON. Output uses the same format.
    #[arg(long)]
    input: PathBuf,
    /// Reflect the hanging path at this anchor; without it, every hanging
    /// path is re-oriented outward.
    #[arg(long)]
    anchor: Option<usize>,
}

#[derive(Args)]
struct CensusArgs {
    /// Poset size (4..=9 at desk scale).
    #[arg(long, visible_alias = "n")]
    size: usize,
    /// Worker count; the output is identical for any value.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(usize))]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SizeArgs {
    #[arg(long, visible_alias = "n", value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Classify(args) => classify_cmd(&args),
        Command::Gram(args) => gram_cmd(&args),
        Command::Kernel(args) => kernel_cmd(&args),
        Command::Witness(args) => witness_cmd(&args),
        Command::Reflect(args) => reflect_cmd(&args),
        Command::Census(args) => census_cmd(&args),
        Command::Orient(args) => orient_cmd(&args),
        Command::Count(args) => count_cmd(&args),
    }
}

fn load(path: &Path) -> Result<(Poset, InputFormat), Box<dyn std::error::Error>> {
    let raw = fs::read_to_string(path)
        .map_err(|e| format!("Io: cannot read {}: {e}", path.display()))?;
    Ok(Poset::parse_auto(&raw)?)
}

fn bigints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn bigints_text(v: &[BigInt]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

// ---- classify ----

fn classify_json(p: &Poset, full: &FullClassification) -> Value {
    let dynkin = full.dynkin.map(|d| d.to_string());
    match &full.definiteness {
        Definiteness::NonNegative { corank } => {
            let kernel =
                kernel_z_basis(p).expect("non-negative forms always have a kernel lattice");
            json!({
                "definiteness": "NonNegative",
                "corank": corank,
                "dynkin": dynkin,
                "method": full.method.to_string(),
                "kernel_basis": kernel.vectors.iter().map(|v| bigints_json(v)).collect::<Vec<_>>(),
                "witness": Value::Null,
                "special_deleted": full.special_deleted,
            })
        }
        Definiteness::Indefinite { witness } => json!({
            "definiteness": "Indefinite",
            "corank": Value::Null,
            "dynkin": Value::Null,
            "method": full.method.to_string(),
            "kernel_basis": Value::Null,
            "witness": bigints_json(witness),
            "special_deleted": Value::Null,
        }),
    }
}

fn classify_cmd(args: &InputArgs) -> CliResult {
    let (p, _) = load(&args.input)?;
    let full = dynkin_type(&p)?;
    match args.format {
        Format::Json => println!("{}", classify_json(&p, &full)),
        Format::Text => match &full.definiteness {
            Definiteness::NonNegative { corank } => {
                println!("definiteness: non-negative");
                println!("corank: {corank}");
                match full.dynkin {
                    Some(d) => println!("dynkin: {d}"),
                    None => println!("dynkin: (none)"),
                }
                println!("method: {}", full.method);
                let kernel =
                    kernel_z_basis(&p).expect("non-negative forms always have a kernel lattice");
                if kernel.vectors.is_empty() {
                    println!("kernel basis: (trivial)");
                } else {
                    println!("kernel basis:");
                    for v in &kernel.vectors {
                        println!("  {}", bigints_text(v));
                    }
                }
                if let Some(deleted) = &full.special_deleted {
                    println!("special deletion: {deleted:?}");
                }
            }
            Definiteness::Indefinite { witness } => {
                let q = evaluate_q(&p, witness)?;
                println!("definiteness: indefinite");
                println!("witness: {}", bigints_text(witness));
                println!("q(witness): {q}");
                println!("method: {}", full.method);
            }
        },
    }
    Ok(())
}

// ---- gram ----

fn gram_cmd(args: &InputArgs) -> CliResult {
    let (p, _) = load(&args.input)?;
    let doubled = symmetric_gram(&p);
    let n = p.n();
    let half = |x: &BigInt| BigRational::new(x.clone(), BigInt::from(2));
    match args.format {
        Format::Json => {
            let doubled_rows: Vec<Vec<i64>> = doubled
                .rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| i64::try_from(x).expect("entries are 0, 1 or 2"))
                        .collect()
                })
                .collect();
            let gram_rows: Vec<Vec<String>> = doubled
                .rows()
                .iter()
                .map(|row| row.iter().map(|x| half(x).to_string()).collect())
                .collect();
            println!("{}", json!({ "n": n, "doubled_gram": doubled_rows, "gram": gram_rows }));
        }
        Format::Text => {
            println!("doubled Gram matrix C + C^T:");
            for row in doubled.rows() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                println!("  {}", cells.join(" "));
            }
            println!("Gram matrix G = (C + C^T)/2:");
            for row in doubled.rows() {
                let cells: Vec<String> = row.iter().map(|x| half(x).to_string()).collect();
                println!("  {}", cells.join(" "));
            }
        }
    }
    Ok(())
}

// ---- kernel ----

fn kernel_json(kernel: &KernelBasis) -> Value {
    json!({
        "corank": kernel.vectors.len(),
        "vectors": kernel.vectors.iter().map(|v| bigints_json(v)).collect::<Vec<_>>(),
        "special_indices": kernel.special_indices,
    })
}

fn kernel_cmd(args: &InputArgs) -> CliResult {
    let (p, _) = load(&args.input)?;
    let kernel = kernel_z_basis(&p)?;
    match args.format {
        Format::Json => println!("{}", kernel_json(&kernel)),
        Format::Text => {
            println!("corank: {}", kernel.vectors.len());
            for v in &kernel.vectors {
                println!("  {}", bigints_text(v));
            }
            if let Some(special) = &kernel.special_indices {
                println!("special indices: {special:?}");
            }
        }
    }
    Ok(())
}

// ---- witness ----

fn witness_cmd(args: &InputArgs) -> CliResult {
    let (p, _) = load(&args.input)?;
    match classify_definiteness(&p) {
        Definiteness::NonNegative { .. } => match args.format {
            Format::Json => println!("{}", json!({ "witness": Value::Null, "q": Value::Null })),
            Format::Text => println!("none (non-negative)"),
        },
        Definiteness::Indefinite { witness } => {
            let q = evaluate_q(&p, &witness)?;
            match args.format {
                Format::Json => println!(
                    "{}",
                    json!({ "witness": bigints_json(&witness), "q": q.to_string() })
                ),
                Format::Text => {
                    println!("witness: {}", bigints_text(&witness));
                    println!("q(witness): {q}");
                }
            }
        }
    }
    Ok(())
}

// ---- reflect ----

fn reflect_cmd(args: &ReflectArgs) -> CliResult {
    let (p, format) = load(&args.input)?;
    let result = match args.anchor {
        Some(anchor) => {
            let ap = anchored_path_at(&p, anchor)?;
            reflect(&p, &ap)?
        }
        None => normalize_hanging_paths(&p).0,
    };
    print!("{}", result.render(format));
    Ok(())
}

// ---- census ----

fn census_row_json(row: &CensusRow) -> Value {
    json!({
        "n": row.n,
        "total_qualifying": row.total_qualifying,
        "positive_a": row.positive_a,
        "positive_d1": row.positive_d1,
        "positive_d2": row.positive_d2,
        "positive_d3": row.positive_d3,
        "positive_e": row.positive_e,
        "principal_a": row.principal_a,
        "principal_e": row.principal_e,
        "indefinite": row.indefinite,
    })
}

fn census_cmd(args: &CensusArgs) -> CliResult {
    let (row, principal_e_normalized) = census_detailed(args.size, args.jobs)?;
    match args.format {
        Format::Json => println!("{}", Value::Array(vec![census_row_json(&row)])),
        Format::Text => {
            println!(
                "{:>3} {:>7} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}",
                "n", "total", "posA", "posD1", "posD2", "posD3", "posE", "prinA", "prinE",
                "indef"
            );
            println!(
                "{:>3} {:>7} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}",
                row.n,
                row.total_qualifying,
                row.positive_a,
                row.positive_d1,
                row.positive_d2,
                row.positive_d3,
                row.positive_e,
                row.principal_a,
                row.principal_e,
                row.indefinite
            );
            println!(
                "principal E classes after hanging-path re-orientation: {principal_e_normalized}"
            );
        }
    }
    Ok(())
}

// ---- orient ----

fn orientation_json(count: &OrientationCount) -> Value {
    json!({ "labeled": count.labeled.to_string(), "up_to_iso": count.up_to_iso })
}

fn orient_cmd(args: &SizeArgs) -> CliResult {
    let n = args.size as usize;
    let path = enumerate_path_orientations(n)?;
    let cycle = if n >= 3 { Some(enumerate_cycle_orientations(n)?) } else { None };
    let acyclic = cycle.as_ref().map(|c| c.up_to_iso - 1);
    match args.format {
        Format::Json => {
            println!(
                "{}",
                json!({
                    "n": n,
                    "path": orientation_json(&path),
                    "cycle": cycle.as_ref().map(orientation_json),
                    "acyclic_cycle_classes": acyclic,
                })
            );
        }
        Format::Text => {
            println!("n = {n}");
            println!(
                "path orientations: {} labeled, {} classes",
                path.labeled, path.up_to_iso
            );
            match (&cycle, acyclic) {
                (Some(c), Some(a)) => println!(
                    "cycle orientations: {} labeled, {} classes ({} acyclic)",
                    c.labeled, c.up_to_iso, a
                ),
                _ => println!("cycle orientations: (cycles need at least 3 points)"),
            }
        }
    }
    Ok(())
}

// ---- count ----

fn count_cmd(args: &SizeArgs) -> CliResult {
    let max_n = args.size;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let n_p = count_path_orientations(n).to_string();
        let (n_c, n_tilde) = if n >= 3 {
            (
                Some(count_cycle_orientations(n)?.to_string()),
                Some(count_principal_a(n)?.to_string()),
            )
        } else {
            (None, None)
        };
        let nneg = count_nonnegative_a(n)?.to_string();
        rows.push((n, n_p, n_c, n_tilde, nneg));
    }
    match args.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(n, n_p, n_c, n_tilde, nneg)| {
                    json!({
                        "n": n,
                        "N_P": n_p,
                        "N_C": n_c,
                        "N_tildeA": n_tilde,
                        "Nneg_A": nneg,
                    })
                })
                .collect();
            println!("{}", Value::Array(items));
        }
        Format::Text => {
            println!("{:>4} {:>16} {:>16} {:>16} {:>16}", "n", "N_P", "N_C", "N_tildeA", "Nneg_A");
            for (n, n_p, n_c, n_tilde, nneg) in &rows {
                let dash = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
                println!(
                    "{:>4} {:>16} {:>16} {:>16} {:>16}",
                    n,
                    n_p,
                    dash(n_c),
                    dash(n_tilde),
                    nneg
                );
            }
        }
    }
    Ok(())
}
