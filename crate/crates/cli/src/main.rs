use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use k3moduli::binary::{aut_image, automorphism_generators, improper_automorph, reduce};
use k3moduli::deformation::case_table;
use k3moduli::moduli::{count_components_with, list_components_with};
use k3moduli::{
    enumerate_full, enumerate_rad, is_deformation_of_hyperelliptic, validate_full, BinaryForm, ComponentFlags, Error,
    FiniteForm, GenusInvariants, IntMatrix, IntegralLattice,
};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "k3moduli", version, about = "Components of moduli of real polarized K3 surfaces")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Largest finite group enumerated exhaustively.
    #[arg(long, default_value_t = k3moduli::DEFAULT_GROUP_BOUND, global = true)]
    group_bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Full validation report for a set of genus invariants.
    Validate(InvArg),
    /// All admissible (r, a, delta_phi).
    EnumerateRad,
    /// All valid genus invariants of primitive degree n.
    EnumerateGenus {
        #[arg(long)]
        n: u64,
    },
    /// Connected components of moduli.
    Components {
        #[command(subcommand)]
        action: ComponentsAction,
    },
    /// Whether a component deforms to a hyper-elliptically polarized surface.
    Deformable {
        #[command(flatten)]
        inv: InvArg,
        #[command(flatten)]
        flags: FlagArgs,
    },
    /// Hyper-elliptic cases admissible at degree n.
    CaseTable {
        #[arg(long)]
        n: u64,
    },
    /// Lattice utilities.
    Lattice {
        #[command(subcommand)]
        action: LatticeAction,
    },
    /// Finite and binary form utilities.
    Form {
        #[command(subcommand)]
        action: FormAction,
    },
}

#[derive(Args)]
struct InvArg {
    /// Invariants as inline JSON or `@file`.
    #[arg(long)]
    inv: String,
}

#[derive(Args)]
#[group(multiple = false)]
struct FlagArgs {
    /// The component is the standard one.
    #[arg(long)]
    standard: bool,
    /// The component differs from the standard one only over 2.
    #[arg(long)]
    over2: bool,
    /// Neither standard nor different only over 2.
    #[arg(long)]
    other: bool,
}

#[derive(Subcommand)]
enum ComponentsAction {
    Count(InvArg),
    List(InvArg),
}

#[derive(Subcommand)]
enum LatticeAction {
    /// Discriminant form of a Gram matrix (quadratic if even, else bilinear).
    DiscForm {
        #[arg(long)]
        gram: String,
    },
}

#[derive(Subcommand)]
enum FormAction {
    /// Automorphisms of a binary form `{"a","b","c"}` or orthogonal group of a
    /// finite form `{"kind","orders","gram"}`.
    Aut {
        #[arg(long)]
        spec: String,
    },
}

enum Failure {
    Invalid(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInvariants(report) => Failure::Invalid(format!(
                "invalid invariants: {}\n{}",
                report.summary(),
                serde_json::to_string(&report).unwrap_or_default()
            )),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Run = Result<String, Failure>;

fn read_arg(raw: &str) -> Result<String, Failure> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Internal(format!("{path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn parse_json(raw: &str) -> Result<Value, Failure> {
    serde_json::from_str(&read_arg(raw)?).map_err(|e| Failure::Internal(format!("malformed JSON: {e}")))
}

/// Invariants with `k` defaulting to its minimum admissible value.
fn parse_inv(raw: &str) -> Result<GenusInvariants, Failure> {
    let mut v = parse_json(raw)?;
    if let Value::Object(map) = &mut v {
        if !map.contains_key("k") {
            let n = map.get("n").and_then(Value::as_u64).unwrap_or(0);
            map.insert("k".into(), json!(k3moduli::invariants::min_k(n)));
        }
    }
    serde_json::from_value(v).map_err(|e| Failure::Internal(format!("invariants: {e}")))
}

fn big(v: &Value) -> Result<BigInt, Failure> {
    let bad = || Failure::Internal(format!("not an integer: {v}"));
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
        Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn int_json(x: &BigInt) -> Value {
    i64::try_from(x).map(Value::from).unwrap_or_else(|_| Value::String(x.to_string()))
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(int_json).collect()))
            .collect(),
    )
}

fn compact(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn tsv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

fn inv_row(i: &GenusInvariants) -> Vec<String> {
    vec![
        i.r.to_string(),
        i.a.to_string(),
        i.delta_phi.to_string(),
        i.k.to_string(),
        i.n.to_string(),
        i.delta_p.to_string(),
        i.delta_phi_p.to_string(),
    ]
}

const INV_HEADER: [&str; 7] = ["r", "a", "delta_phi", "k", "n", "delta_P", "delta_phiP"];

fn validate(format: Format, raw: &str) -> Run {
    let inv = parse_inv(raw)?;
    let report = validate_full(&inv);
    let out = match format {
        Format::Json => pretty(&json!({"invariants": inv, "valid": report.valid, "violated": report.violated})),
        Format::Tsv => tsv(
            &["id", "text"],
            report.violated.iter().map(|v| vec![v.id.clone(), v.text.clone()]),
        ),
    };
    if report.valid {
        Ok(out)
    } else {
        Err(Failure::Invalid(out))
    }
}

fn enumerate_rad_cmd(format: Format) -> Run {
    let mut pts = enumerate_rad();
    pts.sort();
    Ok(match format {
        Format::Json => pretty(
            &pts.iter()
                .map(|(r, a, d)| json!({"r": r, "a": a, "delta_phi": d}))
                .collect::<Vec<_>>(),
        ),
        Format::Tsv => tsv(
            &["r", "a", "delta_phi"],
            pts.iter().map(|(r, a, d)| vec![r.to_string(), a.to_string(), d.to_string()]),
        ),
    })
}

fn enumerate_genus(format: Format, n: u64) -> Run {
    let all = enumerate_full(n)?;
    Ok(match format {
        Format::Json => pretty(&all),
        Format::Tsv => tsv(&INV_HEADER, all.iter().map(inv_row)),
    })
}

fn components(format: Format, bound: usize, action: &ComponentsAction) -> Run {
    match action {
        ComponentsAction::Count(arg) => {
            let inv = parse_inv(&arg.inv)?;
            let count = count_components_with(&inv, bound)?;
            Ok(match format {
                Format::Json => pretty(&count),
                Format::Tsv => tsv(
                    &["method", "lattice_class", "count"],
                    count.per_class.iter().map(|c| {
                        vec![
                            count.method.to_string(),
                            c.lattice_class.as_ref().map_or("-".into(), |l| l.to_string()),
                            c.count.to_string(),
                        ]
                    }),
                ),
            })
        }
        ComponentsAction::List(arg) => {
            let inv = parse_inv(&arg.inv)?;
            let list = list_components_with(&inv, bound)?;
            Ok(match format {
                Format::Json => pretty(&json!({"total": list.len(), "cases": list})),
                Format::Tsv => tsv(
                    &["case_tag", "lattice_class", "label", "standard", "over2"],
                    list.iter().map(|d| {
                        vec![
                            d.case_tag.to_string(),
                            d.lattice_class.as_ref().map_or("-".into(), |l| l.to_string()),
                            d.label.as_ref().map_or("-".into(), |l| compact(&l.images())),
                            d.is_standard.to_string(),
                            d.is_over2.to_string(),
                        ]
                    }),
                ),
            })
        }
    }
}

fn deformable(format: Format, raw: &str, f: &FlagArgs) -> Run {
    let inv = parse_inv(raw)?;
    let flags = if f.standard {
        Some(ComponentFlags {
            standard: true,
            over2: true,
        })
    } else if f.over2 {
        Some(ComponentFlags {
            standard: false,
            over2: true,
        })
    } else if f.other {
        Some(ComponentFlags::default())
    } else {
        None
    };
    let v = is_deformation_of_hyperelliptic(&inv, flags)?;
    Ok(match format {
        Format::Json => pretty(&v),
        Format::Tsv => tsv(
            &["deformable", "clause", "witness_case"],
            [vec![
                v.deformable.to_string(),
                v.clause.to_string(),
                v.witness_case.map_or("-".into(), |t| t.to_string()),
            ]],
        ),
    })
}

fn case_table_cmd(format: Format, n: u64) -> Run {
    let table = case_table(n)?;
    Ok(match format {
        Format::Json => pretty(&table),
        Format::Tsv => tsv(
            &[
                "case", "n", "r", "a", "delta_phi", "delta_P", "delta_phiP", "folds_into", "P", "scroll_data",
            ],
            table.iter().map(|c| {
                let recipe = c
                    .recipe
                    .iter()
                    .map(|(g, k)| format!("{k}*{g}"))
                    .collect::<Vec<_>>()
                    .join("+");
                vec![
                    c.tag.to_string(),
                    c.n.to_string(),
                    c.r.to_string(),
                    c.a.to_string(),
                    c.delta_phi.to_string(),
                    c.delta_p.to_string(),
                    c.delta_phi_p.to_string(),
                    c.folds_into.map_or("-".into(), |t| t.to_string()),
                    recipe,
                    c.scroll_data.clone(),
                ]
            }),
        ),
    })
}

fn parse_gram(raw: &str) -> Result<IntMatrix, Failure> {
    let v = parse_json(raw)?;
    let rows = v
        .as_array()
        .ok_or_else(|| Failure::Internal("Gram matrix must be an array of rows".into()))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Failure::Internal("Gram row must be an array".into()))?
                .iter()
                .map(big)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntMatrix::from_rows(&rows)?)
}

fn form_tsv(form: &FiniteForm) -> String {
    tsv(
        &["generator", "order", "values"],
        form.group().orders().iter().enumerate().map(|(i, d)| {
            let values = form.gram()[i].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            vec![i.to_string(), d.to_string(), values]
        }),
    )
}

fn disc_form(format: Format, raw: &str) -> Run {
    let l = IntegralLattice::new(parse_gram(raw)?)?;
    let kind = if l.is_even() {
        k3moduli::FormKind::Quadratic
    } else {
        k3moduli::FormKind::Bilinear
    };
    let form = l.discriminant(kind)?.form;
    Ok(match format {
        Format::Json => {
            let (p, m) = l.signature();
            pretty(&json!({
                "det": int_json(l.det()),
                "signature": [p, m],
                "even": l.is_even(),
                "form": form,
            }))
        }
        Format::Tsv => form_tsv(&form),
    })
}

fn form_aut(format: Format, bound: usize, raw: &str) -> Run {
    let v = parse_json(raw)?;
    if v.get("orders").is_some() {
        let form: FiniteForm =
            serde_json::from_value(v).map_err(|e| Failure::Internal(format!("finite form: {e}")))?;
        let group = form.orthogonal_group(bound)?;
        return Ok(match format {
            Format::Json => pretty(&json!({
                "form": form,
                "order": group.len(),
                "elements": group.iter().map(|g| g.images()).collect::<Vec<_>>(),
            })),
            Format::Tsv => tsv(&["index", "images"], group.iter().enumerate().map(|(i, g)| vec![i.to_string(), compact(&g.images())])),
        });
    }
    let coef = |k: &str| v.get(k).ok_or_else(|| Failure::Internal(format!("missing key {k:?}"))).and_then(big);
    let f = BinaryForm::new(coef("a")?, coef("b")?, coef("c")?);
    let red = reduce(&f)?;
    let gens = automorphism_generators(&f)?;
    let data = f.lattice()?.discriminant_form();
    let image = aut_image(&f, &data, bound)?;
    let improper = improper_automorph(&f)?;
    Ok(match format {
        Format::Json => pretty(&json!({
            "form": f.to_string(),
            "disc": int_json(&f.disc()),
            "reduced": red.form.to_string(),
            "reduction": matrix_json(&red.transform),
            "generators": gens.iter().map(matrix_json).collect::<Vec<_>>(),
            "improper": improper.as_ref().map(matrix_json),
            "discriminant_form": data.form,
            "image_order": image.elements.len(),
        })),
        Format::Tsv => {
            let mut s = String::from("generator\tmatrix\n");
            for (i, g) in gens.iter().enumerate() {
                let _ = writeln!(s, "{i}\t{}", compact(&matrix_json(g)));
            }
            s
        }
    })
}

fn run(cli: &Cli) -> Run {
    let (format, bound) = (cli.format, cli.group_bound);
    match &cli.command {
        Command::Validate(arg) => validate(format, &arg.inv),
        Command::EnumerateRad => enumerate_rad_cmd(format),
        Command::EnumerateGenus { n } => enumerate_genus(format, *n),
        Command::Components { action } => components(format, bound, action),
        Command::Deformable { inv, flags } => deformable(format, &inv.inv, flags),
        Command::CaseTable { n } => case_table_cmd(format, *n),
        Command::Lattice {
            action: LatticeAction::DiscForm { gram },
        } => disc_form(format, gram),
        Command::Form {
            action: FormAction::Aut { spec },
        } => form_aut(format, bound, spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            if matches!(cli.command, Command::Validate(_)) {
                print!("{msg}");
            } else {
                eprintln!("{msg}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
