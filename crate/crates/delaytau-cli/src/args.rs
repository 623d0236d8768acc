//! Command-line surface: subcommands, flags, and the small grammars for
//! basis descriptors, degree ranges, and frequency grids.
//!
//! Parsing is strict so that a typo fails the invocation (exit code 2)
//! instead of silently computing something else.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use delaytau::orthopoly::BasisKind;

/// Finite pencil discretizations of single-delay linear systems.
#[derive(Parser, Debug)]
#[command(name = "delaytau", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

/// The available subcommands.
#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Assemble one realization and write its matrices as JSON.
    Discretize(DiscretizeArgs),
    /// Sweep the degree and tabulate H2 norms against a reference.
    Converge(ConvergeArgs),
    /// Tabulate characteristic roots and their Newton refinements.
    Roots(RootsArgs),
    /// Scan exact and reduced transfer moduli over a frequency grid.
    Tfscan(TfscanArgs),
    /// Report the moment defects of the delay-exponential approximant.
    PadeCheck(PadeCheckArgs),
}

/// Realization method.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Weak-form pencil on the requested basis.
    Tau,
    /// Collocation on the Chebyshev extremal mesh.
    Colloc,
    /// First-kind coefficients with second-kind test recombination.
    Mixed,
}

impl Method {
    /// Word used in CSV columns and JSON metadata.
    pub fn word(self) -> &'static str {
        match self {
            Method::Tau => "tau",
            Method::Colloc => "collocation",
            Method::Mixed => "mixed",
        }
    }
}

/// Arguments of `discretize`.
#[derive(clap::Args, Debug)]
pub struct DiscretizeArgs {
    /// Path to the system description JSON file.
    #[arg(long)]
    pub system: PathBuf,
    /// Basis family: cheb1 | cheb2 | legendre | jacobi:alpha:beta.
    #[arg(long)]
    pub basis: Option<BasisArg>,
    /// Realization method.
    #[arg(long, value_enum, default_value_t = Method::Tau)]
    pub method: Method,
    /// Degree of the realization (a single value).
    #[arg(long = "N", value_parser = parse_degree)]
    pub n: usize,
    /// Delay horizon for the basis; defaults to the system delay.
    #[arg(long = "basis-tau")]
    pub basis_tau: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `converge`.
#[derive(clap::Args, Debug)]
pub struct ConvergeArgs {
    /// Path to the system description JSON file.
    #[arg(long)]
    pub system: PathBuf,
    /// Basis family for tau rows and for the reference solve.
    #[arg(long)]
    pub basis: BasisArg,
    /// Methods to tabulate; repeat or separate with commas.
    #[arg(long = "method", value_enum, value_delimiter = ',', default_values_t = [Method::Tau])]
    pub methods: Vec<Method>,
    /// Degree range, e.g. 5..40 or a single value.
    #[arg(long = "N")]
    pub n: NRange,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `roots`.
#[derive(clap::Args, Debug)]
pub struct RootsArgs {
    /// Path to the system description JSON file.
    #[arg(long)]
    pub system: PathBuf,
    /// Basis family: cheb1 | cheb2 | legendre | jacobi:alpha:beta.
    #[arg(long)]
    pub basis: Option<BasisArg>,
    /// Realization method.
    #[arg(long, value_enum, default_value_t = Method::Tau)]
    pub method: Method,
    /// Degree range, e.g. 5..40 or a single value.
    #[arg(long = "N")]
    pub n: NRange,
    /// How many rightmost roots to track per degree.
    #[arg(long, default_value_t = 2)]
    pub count: usize,
    /// Track only roots whose pencil residual is at most this value.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `tfscan`.
#[derive(clap::Args, Debug)]
pub struct TfscanArgs {
    /// Path to the system description JSON file.
    #[arg(long)]
    pub system: PathBuf,
    /// Basis family: cheb1 | cheb2 | legendre | jacobi:alpha:beta.
    #[arg(long)]
    pub basis: Option<BasisArg>,
    /// Realization method.
    #[arg(long, value_enum, default_value_t = Method::Tau)]
    pub method: Method,
    /// Degree of the realization (a single value).
    #[arg(long = "N", value_parser = parse_degree)]
    pub n: usize,
    /// Frequency grid lo:hi:count with both endpoints included.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: OmegaGrid,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Arguments of `pade-check`.
#[derive(clap::Args, Debug)]
pub struct PadeCheckArgs {
    /// Basis family: cheb1 | cheb2 | legendre | jacobi:alpha:beta.
    #[arg(long)]
    pub basis: BasisArg,
    /// Delay horizon of the basis.
    #[arg(long = "basis-tau", default_value_t = 1.0)]
    pub basis_tau: f64,
    /// Degree of the approximant (a single value).
    #[arg(long = "N", value_parser = parse_degree)]
    pub n: usize,
    /// Prefactor of the moment bound tol * n! * tau^n.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A parsed basis descriptor.
#[derive(Clone, Debug)]
pub struct BasisArg {
    kind: BasisKind<f64>,
}

impl BasisArg {
    /// The basis family this descriptor names.
    pub fn kind(&self) -> BasisKind<f64> {
        self.kind
    }

    /// Canonical label used in CSV columns and JSON metadata,
    /// independent of how the user spelled the flag value.
    pub fn label(&self) -> String {
        match self.kind {
            BasisKind::Chebyshev1 => "cheb1".into(),
            BasisKind::Chebyshev2 => "cheb2".into(),
            BasisKind::Legendre => "legendre".into(),
            BasisKind::Jacobi { alpha, beta } => format!("jacobi:{alpha}:{beta}"),
        }
    }
}

impl FromStr for BasisArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s {
            "cheb1" => BasisKind::Chebyshev1,
            "cheb2" => BasisKind::Chebyshev2,
            "legendre" => BasisKind::Legendre,
            other => match other.strip_prefix("jacobi:") {
                Some(rest) => {
                    let mut parts = rest.splitn(2, ':');
                    let alpha = parts
                        .next()
                        .and_then(|p| p.parse::<f64>().ok())
                        .ok_or_else(|| bad_basis(s))?;
                    let beta = parts
                        .next()
                        .and_then(|p| p.parse::<f64>().ok())
                        .ok_or_else(|| bad_basis(s))?;
                    BasisKind::Jacobi { alpha, beta }
                }
                None => return Err(bad_basis(s)),
            },
        };
        Ok(BasisArg { kind })
    }
}

fn bad_basis(s: &str) -> String {
    format!("`{s}` is not a basis; expected cheb1 | cheb2 | legendre | jacobi:alpha:beta")
}

/// An inclusive, ascending degree range.
#[derive(Clone, Copy, Debug)]
pub struct NRange {
    /// Smallest degree, at least 1.
    pub lo: usize,
    /// Largest degree, at least `lo`.
    pub hi: usize,
}

impl NRange {
    /// Degrees in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("`{s}` is not a degree range; expected N or lo..hi with 1 <= lo <= hi");
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (
                a.parse::<usize>().map_err(|_| err())?,
                b.parse::<usize>().map_err(|_| err())?,
            ),
            None => {
                let n = s.parse::<usize>().map_err(|_| err())?;
                (n, n)
            }
        };
        if lo < 1 || hi < lo {
            return Err(err());
        }
        Ok(NRange { lo, hi })
    }
}

fn parse_degree(s: &str) -> Result<usize, String> {
    let n = s
        .parse::<usize>()
        .map_err(|_| format!("`{s}` is not a degree; expected a single integer >= 1"))?;
    if n < 1 {
        return Err("the degree must be at least 1".into());
    }
    Ok(n)
}

/// A uniform frequency grid with both endpoints included exactly.
#[derive(Clone, Copy, Debug)]
pub struct OmegaGrid {
    /// Left endpoint.
    pub lo: f64,
    /// Right endpoint, at least `lo`.
    pub hi: f64,
    /// Number of points; at least 2 unless the grid is a single point.
    pub count: usize,
}

impl OmegaGrid {
    /// Grid points in ascending order. The first and last entries are
    /// the requested endpoints exactly, not rounded arithmetic near
    /// them.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for OmegaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("`{s}` is not a frequency grid; expected lo:hi:count");
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(err());
        }
        let lo = parts[0].parse::<f64>().map_err(|_| err())?;
        let hi = parts[1].parse::<f64>().map_err(|_| err())?;
        let count = parts[2].parse::<usize>().map_err(|_| err())?;
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(err());
        }
        if count == 0 || (count == 1 && hi != lo) || (count >= 2 && hi == lo) {
            return Err(format!(
                "`{s}`: the point count must match the span (1 point only for lo == hi)"
            ));
        }
        Ok(OmegaGrid { lo, hi, count })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_grammar_round_trips() {
        assert!(matches!(
            "cheb2".parse::<BasisArg>().unwrap().kind(),
            BasisKind::Chebyshev2
        ));
        let j = "jacobi:-0.5:-0.75".parse::<BasisArg>().unwrap();
        match j.kind() {
            BasisKind::Jacobi { alpha, beta } => {
                assert_eq!(alpha, -0.5);
                assert_eq!(beta, -0.75);
            }
            other => panic!("parsed {other:?}"),
        }
        assert_eq!(j.label(), "jacobi:-0.5:-0.75");
        assert!("chebyshev".parse::<BasisArg>().is_err());
        assert!("jacobi:0.5".parse::<BasisArg>().is_err());
    }

    #[test]
    fn degree_ranges_are_ascending_and_nonempty() {
        let r: NRange = "5..40".parse().unwrap();
        assert_eq!((r.lo, r.hi), (5, 40));
        let single: NRange = "7".parse().unwrap();
        assert_eq!((single.lo, single.hi), (7, 7));
        assert!("9..3".parse::<NRange>().is_err());
        assert!("0..4".parse::<NRange>().is_err());
        assert!("".parse::<NRange>().is_err());
    }

    #[test]
    fn frequency_grids_pin_their_endpoints() {
        let g: OmegaGrid = "-50:50:201".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 201);
        assert_eq!(pts[0], -50.0);
        assert_eq!(pts[200], 50.0);
        assert!("1:0:5".parse::<OmegaGrid>().is_err());
        assert!("0:1:1".parse::<OmegaGrid>().is_err());
        assert!("2:2:5".parse::<OmegaGrid>().is_err());
        let point: OmegaGrid = "2:2:1".parse().unwrap();
        assert_eq!(point.points(), vec![2.0]);
    }

    #[test]
    fn cli_parses_a_full_invocation() {
        let cli = Cli::try_parse_from([
            "delaytau",
            "converge",
            "--system",
            "sys.json",
            "--basis",
            "cheb2",
            "--method",
            "tau,colloc",
            "--N",
            "5..40",
        ])
        .unwrap();
        match cli.cmd {
            Cmd::Converge(args) => {
                assert_eq!(args.methods, vec![Method::Tau, Method::Colloc]);
                assert_eq!((args.n.lo, args.n.hi), (5, 40));
            }
            other => panic!("parsed {other:?}"),
        }
    }
}
