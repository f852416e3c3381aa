use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cpstar::equiv::{a_coeff, tilde_star};
use cpstar::moreno::{k_table_latex, moreno_recursion_residual};
use cpstar::parse::{format_series, parse_expr};
use cpstar::poly::{LaurentElem, VarSpace};
use cpstar::reduce::{k_coeff, mu_star, pullback, reduce_function};
use cpstar::scalar::Rational;
use cpstar::series::Series;
use cpstar::verify::{run_suite, Suite, VerifyConfig};
use cpstar::wick::{wick_product, StarContext, DEFAULT_ORDER};

#[derive(Parser)]
#[command(name = "cpstar", version, about = "Exact star products on complex projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceKind {
    Cpn,
    Dn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Product {
    /// Reduced product on the quotient
    Mu,
    /// Wick product upstairs
    Wick,
    /// Transformed product on invariant elements
    Tilde,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Latex,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    ACoeff,
    KCoeff,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two expressions and print the λ-series
    Mul {
        #[arg(long, value_enum, default_value = "cpn")]
        space: SpaceKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "-1/2", allow_hyphen_values = true)]
        mu: Rational,
        #[arg(long, env = "CPSTAR_ORDER", default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, value_enum, default_value = "mu")]
        product: Product,
        /// Coefficients d0,d1,… of D = Σ (λ/x)^r d_r
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d: Vec<Rational>,
    },
    /// Print a coefficient table
    Table {
        #[arg(value_enum)]
        which: Table,
        #[arg(long, default_value_t = 8)]
        rmax: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Recursion residuals and the k̃ polynomials on the two-sphere
    Moreno {
        #[arg(long, default_value_t = 10)]
        rmax: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run an identity suite; exit status 0 iff every check passes
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "-1/2", allow_hyphen_values = true)]
        mu: Rational,
        #[arg(long, env = "CPSTAR_ORDER", default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        cases: usize,
        #[arg(long, default_value_t = 10)]
        rmax: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Mul {
            space,
            n,
            mu,
            order,
            lhs,
            rhs,
            product,
            d,
        } => {
            let sp = match space {
                SpaceKind::Cpn => VarSpace::euclidean(n),
                SpaceKind::Dn => VarSpace::indefinite(n),
            }
            .map_err(|e| e.to_string())?;
            let d = if d.is_empty() { vec![Rational::from_integer(1.into())] } else { d };
            let ctx = StarContext::new(sp, order, d, mu).map_err(|e| e.to_string())?;
            let f = parse_expr(&lhs, sp, order).map_err(|e| format!("lhs: {e}"))?;
            let g = parse_expr(&rhs, sp, order).map_err(|e| format!("rhs: {e}"))?;
            let out = multiply(&f, &g, product, &ctx).map_err(|e| e.to_string())?;
            print_json(&json!({
                "product": match product { Product::Mu => "mu", Product::Wick => "wick", Product::Tilde => "tilde" },
                "space": match space { SpaceKind::Cpn => "cpn", SpaceKind::Dn => "dn" },
                "n": n,
                "mu": ctx.mu().to_string(),
                "order": order,
                "d": ctx.d().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "coefficients": out.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "series": format_series(&out),
                "terms": serde_json::to_value(&out).map_err(|e| e.to_string())?,
            }));
            Ok(true)
        }
        Command::Table { which, rmax, format } => {
            let rows: Vec<Vec<Rational>> = match which {
                Table::ACoeff => (0..=rmax).map(|r| (0..=rmax).map(|s| a_coeff(r, s)).collect()).collect(),
                Table::KCoeff => (1..=rmax).map(|r| (1..=r).map(|s| k_coeff(r, s)).collect()).collect(),
            };
            match format {
                Format::Latex => print!("{}", latex_matrix(&rows)),
                Format::Text => {
                    for row in &rows {
                        println!("{}", row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
                    }
                }
                Format::Json => print_json(&json!({
                    "table": match which { Table::ACoeff => "a-coeff", Table::KCoeff => "k-coeff" },
                    "rmax": rmax,
                    "rows": rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })),
            }
            Ok(true)
        }
        Command::Moreno { rmax, format } => {
            let residuals: Vec<String> = (1..=rmax).map(|r| moreno_recursion_residual(r).to_latex()).collect();
            let ok = (1..=rmax).all(|r| moreno_recursion_residual(r).is_zero());
            match format {
                Format::Json => print_json(&json!({
                    "residuals": residuals,
                    "all_zero": ok,
                    "latex": k_table_latex(rmax, 1),
                })),
                _ => {
                    for (r, res) in residuals.iter().enumerate() {
                        println!("r={} residual {res}", r + 1);
                    }
                    print!("{}", k_table_latex(rmax, 1));
                }
            }
            Ok(ok)
        }
        Command::Verify {
            suite,
            n,
            mu,
            order,
            seed,
            cases,
            rmax,
            format,
        } => {
            let suite = Suite::from_name(&suite).ok_or_else(|| format!("unknown suite {suite}"))?;
            let cfg = VerifyConfig {
                n,
                indefinite: false,
                mu,
                order,
                seed,
                cases,
                rmax,
            };
            let report = run_suite(suite, &cfg);
            match format {
                Format::Json => print_json(&serde_json::to_value(&report).map_err(|e| e.to_string())?),
                _ => {
                    for c in &report.checks {
                        let status = if c.passed { "pass" } else { "FAIL" };
                        match &c.residual {
                            Some(r) => println!("{status} {}: {r}", c.name),
                            None => println!("{status} {}", c.name),
                        }
                    }
                    let failed = report.failures().count();
                    println!("{}: {} checks, {failed} failed, {:.2}s", report.suite, report.count(), report.seconds);
                }
            }
            Ok(report.passed())
        }
    }
}

fn multiply(
    f: &Series<LaurentElem>,
    g: &Series<LaurentElem>,
    product: Product,
    ctx: &StarContext,
) -> cpstar::error::Result<Series<LaurentElem>> {
    match product {
        Product::Wick => wick_product(f, g, ctx),
        Product::Tilde => tilde_star(f, g, ctx),
        Product::Mu => {
            let phi = reduce_function(f, ctx)?;
            let psi = reduce_function(g, ctx)?;
            Ok(pullback(&mu_star(&phi, &psi, ctx)?))
        }
    }
}

fn latex_matrix(rows: &[Vec<Rational>]) -> String {
    let cell = |c: &Rational| {
        if c.is_integer() {
            c.to_string()
        } else {
            let sign = if c < &Rational::from_integer(0.into()) { "-" } else { "" };
            format!("{sign}\\frac{{{}}}{{{}}}", c.numer().magnitude(), c.denom())
        }
    };
    let mut out = String::from("\\begin{pmatrix}\n");
    for row in rows {
        out.push_str(&row.iter().map(cell).collect::<Vec<_>>().join(" & "));
        out.push_str(" \\\\\n");
    }
    out.push_str("\\end{pmatrix}\n");
    out
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}
