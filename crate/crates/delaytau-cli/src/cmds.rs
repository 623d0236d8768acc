//! Subcommand implementations.
//!
//! Each function returns the finished artifact as a string; the caller
//! decides where it goes. Inside a sweep, numerical failures of a single
//! entry (an unstable degree, a stalled refinement) become `nan` cells
//! so the rest of the sweep still completes, while configuration
//! mistakes abort the whole invocation.

use std::path::Path;

use delaytau::discretize::{
    build_collocation, build_tau, build_tau_mixed, chebyshev_extremal_mesh, Realization,
};
use delaytau::h2::{h2_exact_hayes, h2_norm};
use delaytau::numerics::Spectrum;
use delaytau::orthopoly::{BasisKind, BasisSpec};
use delaytau::rational::{factorial, pade_moment_defect, tf_exact, tf_of};
use delaytau::spectrum::{char_roots, refine_root};
use delaytau::{CMat64, CollocRealization64, DelaySystem64, Mat64, TauRealization64};
use num_complex::Complex;

use crate::args::{
    BasisArg, ConvergeArgs, DiscretizeArgs, Method, PadeCheckArgs, RootsArgs, TfscanArgs,
};
use crate::error::CliError;
use crate::out::sig17;

/// Relative errors below this floor are reported as the floor itself,
/// keeping log plots of fully converged sweeps bounded.
const RELERR_FLOOR: f64 = 1e-16;

/// A realization of either flavor, dispatched behind one face.
enum Built {
    Tau(TauRealization64),
    Colloc(CollocRealization64),
}

impl Built {
    fn parts(&self) -> (Option<&Mat64>, &Mat64, &Mat64, &Mat64) {
        match self {
            Built::Tau(r) => (r.e(), r.a(), r.bm(), r.cm()),
            Built::Colloc(r) => (r.e(), r.a(), r.bm(), r.cm()),
        }
    }

    fn spectrum(&self) -> delaytau::Result<Spectrum<f64>> {
        match self {
            Built::Tau(r) => char_roots(r),
            Built::Colloc(r) => char_roots(r),
        }
    }

    fn tf(&self, s: Complex<f64>) -> delaytau::Result<CMat64> {
        match self {
            Built::Tau(r) => tf_of(r, s),
            Built::Colloc(r) => tf_of(r, s),
        }
    }
}

fn read_system(path: &Path) -> Result<DelaySystem64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(DelaySystem64::from_json_str(&text)?)
}

/// Build the realization a method asks for, validating the flag
/// combinations that do not make sense for it.
fn build(
    sys: &DelaySystem64,
    method: Method,
    basis: Option<&BasisArg>,
    basis_tau: Option<f64>,
    n: usize,
) -> Result<Built, CliError> {
    match method {
        Method::Tau => {
            let arg = basis.ok_or_else(|| {
                CliError::Config("--basis is required for the tau method".into())
            })?;
            let tau = basis_tau.unwrap_or_else(|| sys.tau());
            let spec = BasisSpec::new(arg.kind(), tau)?;
            Ok(Built::Tau(build_tau(sys, &spec, n)?))
        }
        Method::Mixed => {
            if let Some(arg) = basis {
                if !matches!(arg.kind(), BasisKind::Chebyshev1) {
                    return Err(CliError::Config(
                        "the mixed method fixes the basis to cheb1".into(),
                    ));
                }
            }
            if basis_tau.is_some_and(|t| t != sys.tau()) {
                return Err(CliError::Config(
                    "the mixed method always uses the system delay".into(),
                ));
            }
            Ok(Built::Tau(build_tau_mixed(sys, n)?))
        }
        Method::Colloc => {
            if basis.is_some() {
                return Err(CliError::Config(
                    "collocation uses the extremal mesh; --basis does not apply".into(),
                ));
            }
            if basis_tau.is_some() {
                return Err(CliError::Config(
                    "collocation meshes always span the system delay".into(),
                ));
            }
            let mesh = chebyshev_extremal_mesh(sys.tau(), n)?;
            Ok(Built::Colloc(build_collocation(sys, &mesh)?))
        }
    }
}

/// Value of the `basis` column for a row of the given method.
fn row_label(method: Method, basis: Option<&BasisArg>) -> String {
    match method {
        Method::Tau => basis.map(BasisArg::label).unwrap_or_default(),
        Method::Mixed => "cheb1".into(),
        Method::Colloc => "extremal".into(),
    }
}

fn mat_json(m: &Mat64) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows())
            .map(|i| {
                serde_json::Value::Array(m.row(i).iter().map(|&x| serde_json::json!(x)).collect())
            })
            .collect(),
    )
}

/// Assemble one realization and emit its matrices plus metadata as JSON.
/// Realizations without a mass matrix of their own report the identity.
pub fn discretize(args: &DiscretizeArgs) -> Result<String, CliError> {
    let sys = read_system(&args.system)?;
    let built = build(&sys, args.method, args.basis.as_ref(), args.basis_tau, args.n)?;
    let (e, a, bm, cm) = built.parts();
    let e_json = match e {
        Some(m) => mat_json(m),
        None => mat_json(&Mat64::identity(a.rows())),
    };
    let value = serde_json::json!({
        "metadata": {
            "basis": row_label(args.method, args.basis.as_ref()),
            "N": args.n,
            "method": args.method.word(),
        },
        "E": e_json,
        "A": mat_json(a),
        "B": mat_json(bm),
        "C": mat_json(cm),
    });
    Ok(serde_json::to_string_pretty(&value).expect("serializing matrices cannot fail") + "\n")
}

/// The closed-form norm when the system is the scalar equal-coefficient
/// family (up to input/output gain), which lets convergence sweeps
/// measure error against an exact value.
fn closed_form_reference(sys: &DelaySystem64) -> Option<f64> {
    if sys.state_dim() != 1 || sys.inputs() != 1 || sys.outputs() != 1 {
        return None;
    }
    let a0 = sys.a0()[(0, 0)];
    if a0 != sys.a1()[(0, 0)] {
        return None;
    }
    let gain = (sys.b()[(0, 0)] * sys.c()[(0, 0)]).abs();
    h2_exact_hayes(a0, sys.tau()).ok().map(|h| gain * h)
}

fn h2_for(
    sys: &DelaySystem64,
    spec: &BasisSpec<f64>,
    method: Method,
    n: usize,
) -> delaytau::Result<f64> {
    match method {
        Method::Tau => h2_norm(&build_tau(sys, spec, n)?),
        Method::Mixed => h2_norm(&build_tau_mixed(sys, n)?),
        Method::Colloc => {
            let mesh = chebyshev_extremal_mesh(sys.tau(), n)?;
            h2_norm(&build_collocation(sys, &mesh)?)
        }
    }
}

/// Sweep the degree range and tabulate `H^2` norms with relative errors
/// against a reference: the closed form when the system admits one,
/// otherwise the tau solve at the top of the range. The reference and
/// its provenance are recorded in a leading comment so every error
/// column is auditable.
pub fn converge(args: &ConvergeArgs) -> Result<String, CliError> {
    let sys = read_system(&args.system)?;
    if args.methods.contains(&Method::Mixed)
        && !matches!(args.basis.kind(), BasisKind::Chebyshev1)
    {
        return Err(CliError::Config(
            "the mixed method fixes the basis to cheb1".into(),
        ));
    }
    let spec = BasisSpec::new(args.basis.kind(), sys.tau())?;
    let (reference, note) = match closed_form_reference(&sys) {
        Some(v) => (Some(v), format!("{} (closed form)", sig17(v))),
        None => match build_tau(&sys, &spec, args.n.hi).and_then(|r| h2_norm(&r)) {
            Ok(v) => (
                Some(v),
                format!("{} (tau {} N={})", sig17(v), args.basis.label(), args.n.hi),
            ),
            Err(e) if e.is_configuration() => return Err(e.into()),
            Err(e) => (None, format!("unavailable ({})", e.kind())),
        },
    };
    let mut text = format!("# reference={note}\n");
    text.push_str("N,method,basis,h2,relerr_vs_reference\n");
    for n in args.n.iter() {
        for &method in &args.methods {
            let label = row_label(method, Some(&args.basis));
            let (h2, rel) = match h2_for(&sys, &spec, method, n) {
                Ok(v) => {
                    let rel = reference
                        .map(|r| ((v - r).abs() / r.abs()).max(RELERR_FLOOR))
                        .unwrap_or(f64::NAN);
                    (v, rel)
                }
                Err(e) if e.is_configuration() => return Err(e.into()),
                Err(_) => (f64::NAN, f64::NAN),
            };
            text.push_str(&format!(
                "{n},{},{label},{},{}\n",
                method.word(),
                sig17(h2),
                sig17(rel)
            ));
        }
    }
    Ok(text)
}

/// Tabulate the tracked rightmost pencil roots per degree, each with its
/// pencil residual and Newton refinement. Failed refinements keep their
/// pencil row and report `nan` refined coordinates.
pub fn roots(args: &RootsArgs) -> Result<String, CliError> {
    let sys = read_system(&args.system)?;
    if args.count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()));
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
    }
    let tol = args.tol.unwrap_or(f64::INFINITY);
    let mut text = String::from("N,re,im,residual,refined_re,refined_im\n");
    for n in args.n.iter() {
        let spectrum = match build(&sys, args.method, args.basis.as_ref(), None, n) {
            Ok(built) => match built.spectrum() {
                Ok(s) => s,
                Err(e) if e.is_configuration() => return Err(e.into()),
                Err(_) => {
                    text.push_str(&format!("{n},nan,nan,nan,nan,nan\n"));
                    continue;
                }
            },
            Err(CliError::Lib(e)) if !e.is_configuration() => {
                text.push_str(&format!("{n},nan,nan,nan,nan,nan\n"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut taken = 0usize;
        for (z, &res) in spectrum.eigenvalues.iter().zip(&spectrum.residuals) {
            if taken == args.count {
                break;
            }
            if !(res <= tol) {
                continue;
            }
            taken += 1;
            let (rre, rim) = match refine_root(&sys, *z) {
                Ok(r) => (r.re, r.im),
                Err(_) => (f64::NAN, f64::NAN),
            };
            text.push_str(&format!(
                "{n},{},{},{},{},{}\n",
                sig17(z.re),
                sig17(z.im),
                sig17(res),
                sig17(rre),
                sig17(rim)
            ));
        }
    }
    Ok(text)
}

/// Scan the exact and reduced transfer moduli (Frobenius norm) over a
/// frequency grid at a single degree.
pub fn tfscan(args: &TfscanArgs) -> Result<String, CliError> {
    let sys = read_system(&args.system)?;
    let built = build(&sys, args.method, args.basis.as_ref(), None, args.n)?;
    let mut text = String::from("omega,g_exact,g_n\n");
    for w in args.omega.points() {
        let s = Complex::new(0.0, w);
        let g_exact = match tf_exact(&sys, s) {
            Ok(m) => m.frobenius(),
            Err(e) if e.is_configuration() => return Err(e.into()),
            Err(_) => f64::NAN,
        };
        let g_n = match built.tf(s) {
            Ok(m) => m.frobenius(),
            Err(e) if e.is_configuration() => return Err(e.into()),
            Err(_) => f64::NAN,
        };
        text.push_str(&format!(
            "{},{},{}\n",
            sig17(w),
            sig17(g_exact),
            sig17(g_n)
        ));
    }
    Ok(text)
}

/// Report the delay-exponential moment defects of a basis at one degree
/// as a JSON table: defect, bound `tol * n! * tau^n`, and the verdict
/// per order `n` up to one past the matched band.
pub fn pade_check(args: &PadeCheckArgs) -> Result<String, CliError> {
    if !(args.tol > 0.0) {
        return Err(CliError::Config("--tol must be positive".into()));
    }
    let spec = BasisSpec::new(args.basis.kind(), args.basis_tau)?;
    let defects = pade_moment_defect(&spec, args.n, 2 * args.n + 1)?;
    let mut moments = Vec::with_capacity(defects.len());
    let mut all_within = true;
    let mut first_exceed: Option<usize> = None;
    for (k, &d) in defects.iter().enumerate() {
        let bound = args.tol * factorial::<f64>(k) * args.basis_tau.powi(k as i32);
        let within = d.abs() <= bound;
        if k <= 2 * args.n {
            all_within &= within;
        }
        if !within && first_exceed.is_none() {
            first_exceed = Some(k);
        }
        moments.push(serde_json::json!({
            "n": k,
            "defect": d,
            "bound": bound,
            "within": within,
        }));
    }
    let value = serde_json::json!({
        "basis": args.basis.label(),
        "tau": args.basis_tau,
        "N": args.n,
        "bound_prefactor": args.tol,
        "moments": moments,
        "all_within_through_2N": all_within,
        "first_exceed": first_exceed,
    });
    Ok(serde_json::to_string_pretty(&value).expect("serializing the table cannot fail") + "\n")
}
