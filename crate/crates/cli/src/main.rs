//! `smod`: command-line front end for singular moduli, class invariants,
//! continued fractions and identity verification.
//!
//! Exit status: 0 when every result passes, 1 when a verification fails,
//! 2 on a usage error.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use singular_moduli::invariants::InvariantKind;
use singular_moduli::numerics::MIN_DIGITS;
use singular_moduli::{make_context, NomeSpec};

use commands::VerifyScope;

#[derive(Parser)]
#[command(name = "smod", version, about = "High-precision singular moduli and modular identities")]
struct Cli {
    /// Significant decimal digits of every result.
    #[arg(long, global = true, default_value_t = 50)]
    digits: u32,
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

fn nome_spec(text: &str) -> Result<NomeSpec, String> {
    NomeSpec::parse(text).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a theta function or product at a nome.
    Theta {
        #[arg(long = "fn", value_enum)]
        function: ThetaFn,
        /// Decimal nome or `exp(-pi*sqrt(r))`.
        #[arg(long, value_parser = nome_spec)]
        q: NomeSpec,
    },
    /// Squared modulus of `exp(-pi*sqrt(n))` or of an arbitrary nome.
    #[command(group(ArgGroup::new("at").required(true).args(["n", "q"])))]
    Alpha {
        #[arg(long)]
        n: Option<Rational64>,
        #[arg(long, value_parser = nome_spec)]
        q: Option<NomeSpec>,
    },
    /// Class invariant G_n or g_n.
    Invariant {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Rational64,
    },
    /// Ramanujan-Selberg continued fraction S1 or S2.
    Cf {
        #[arg(long = "fn", value_enum)]
        function: CfFn,
        #[arg(long, value_parser = nome_spec)]
        q: NomeSpec,
        /// Largest continued-fraction depth to try.
        #[arg(long, default_value_t = 4096)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = CfRoute::Cf)]
        route: CfRoute,
    },
    /// Singular values attached to n: alpha_n, alpha_9n, alpha_n/9, g_n, G_n, S1, S2.
    Singular {
        #[arg(long)]
        n: Rational64,
    },
    /// Check registered identities and closed forms by relative residual.
    #[command(group(ArgGroup::new("scope").required(true).args(["all", "identity", "fixtures"])))]
    Verify {
        /// Every identity on the standard grid plus every closed form.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        identity: Option<String>,
        /// Single nome for --identity (default: the standard grid).
        #[arg(long, value_parser = nome_spec, requires = "identity")]
        q: Option<NomeSpec>,
        /// File of `<id> <q> <digits> <threshold-exponent>` lines.
        #[arg(long)]
        fixtures: Option<String>,
    },
    /// Registered closed forms next to their direct numeric values.
    #[command(name = "closed-forms")]
    #[command(group(ArgGroup::new("which").required(true).args(["all", "label"])))]
    ClosedForms {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        label: Option<String>,
    },
    /// Predefined tables of values.
    Table {
        #[arg(long, value_enum)]
        set: TableSet,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ThetaFn {
    Phi,
    Psi,
    Fneg,
    Chi,
    Fpos,
}

impl ThetaFn {
    pub fn name(self) -> &'static str {
        match self {
            ThetaFn::Phi => "phi",
            ThetaFn::Psi => "psi",
            ThetaFn::Fneg => "fneg",
            ThetaFn::Chi => "chi",
            ThetaFn::Fpos => "fpos",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    #[value(name = "G")]
    BigG,
    #[value(name = "g")]
    SmallG,
}

impl From<Kind> for InvariantKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::BigG => InvariantKind::BigG,
            Kind::SmallG => InvariantKind::SmallG,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CfFn {
    S1,
    S2,
}

impl CfFn {
    pub fn name(self) -> &'static str {
        match self {
            CfFn::S1 => "S1",
            CfFn::S2 => "S2",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CfRoute {
    Cf,
    Product,
}

impl CfRoute {
    pub fn name(self) -> &'static str {
        match self {
            CfRoute::Cf => "cf",
            CfRoute::Product => "product",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TableSet {
    Section5,
    Invariants,
}

impl TableSet {
    pub fn name(self) -> &'static str {
        match self {
            TableSet::Section5 => "section5",
            TableSet::Invariants => "invariants",
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.digits < MIN_DIGITS {
        eprintln!("error: --digits {} is below the minimum of {MIN_DIGITS}", cli.digits);
        return ExitCode::from(EXIT_USAGE);
    }
    let ctx = match make_context(cli.digits) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match &cli.command {
        Command::Theta { function, q } => commands::theta(*function, q, &ctx),
        Command::Alpha { n, q } => commands::alpha(*n, q.as_ref(), &ctx),
        Command::Invariant { kind, n } => commands::invariant(*kind, *n, &ctx),
        Command::Cf { function, q, terms, route } => commands::cf(*function, q, *terms, *route, &ctx),
        Command::Singular { n } => commands::singular(*n, &ctx),
        Command::Verify { all, identity, q, fixtures } => {
            let scope = match (all, identity, fixtures) {
                (true, _, _) => VerifyScope::All,
                (_, Some(id), _) => VerifyScope::Identity(id.clone(), q.clone()),
                (_, _, Some(path)) => VerifyScope::Fixtures(path.clone()),
                _ => unreachable!("clap requires one scope"),
            };
            commands::verify(&scope, &ctx)
        }
        Command::ClosedForms { all: _, label } => commands::closed_forms(label.as_deref(), &ctx),
        Command::Table { set } => commands::table(*set, &ctx),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if commands::is_usage_error(&e) { EXIT_USAGE } else { EXIT_FAILURE };
            return ExitCode::from(code);
        }
    };
    if cli.json {
        for note in &report.notes {
            eprintln!("note: {note}");
        }
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
