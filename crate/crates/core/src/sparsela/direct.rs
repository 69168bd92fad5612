use std::fmt;
use std::os::raw::{c_int, c_void};
use std::ptr;

use super::csr::CsrMatrix;
use super::umfpack as umf;
use crate::error::{Error, Result};

pub const DEFAULT_RESIDUAL_BOUND: f64 = 1e-12;

/// A reciprocal pivot ratio below this triggers the retry path even when the
/// residual is acceptable.
const RCOND_GUARD: f64 = 1e-14;
const MAX_REFINEMENT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorStatus {
    Factored,
    Refined(usize),
    Retried,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// `‖Ax − b‖₂ / ‖b‖₂`, zero when `b = 0`.
    pub relative_residual: f64,
    pub status: FactorStatus,
    /// `min|U_kk| / max|U_kk|` of the factorization.
    pub rcond: f64,
    pub dimension: usize,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {}, relative residual {:.3e}, pivot ratio {:.3e}, status {:?}",
            self.dimension, self.relative_residual, self.rcond, self.status
        )
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Strategy {
    strategy: f64,
    pivot_tolerance: f64,
    scale: f64,
}

/// Symmetric strategy (AMD on `A + Aᵀ`, diagonal preference), threshold
/// pivoting, row-sum scaling.
const PRIMARY: Strategy = Strategy {
    strategy: umf::STRATEGY_SYMMETRIC,
    pivot_tolerance: 0.1,
    scale: umf::SCALE_SUM,
};

/// Unsymmetric strategy (COLAMD), strict partial pivoting, max-row scaling.
const RETRY: Strategy = Strategy {
    strategy: umf::STRATEGY_UNSYMMETRIC,
    pivot_tolerance: 1.0,
    scale: umf::SCALE_MAX,
};

type PatternKey = (usize, usize, usize, u64);

struct Csc {
    ap: Vec<c_int>,
    ai: Vec<c_int>,
    ax: Vec<f64>,
}

impl Csc {
    fn from_csr(a: &CsrMatrix) -> Result<Self> {
        let at = a.transpose();
        let conv = |v: &[usize]| -> Result<Vec<c_int>> {
            v.iter()
                .map(|&i| c_int::try_from(i).map_err(|_| Error::Resource("matrix exceeds 32-bit index range".into())))
                .collect()
        };
        Ok(Self {
            ap: conv(at.row_ptr())?,
            ai: conv(at.col_idx())?,
            ax: at.values().to_vec(),
        })
    }
}

struct Symbolic(*mut c_void);

impl Drop for Symbolic {
    fn drop(&mut self) {
        // SAFETY: created by umfpack_di_symbolic and freed once.
        unsafe { umf::umfpack_di_free_symbolic(&mut self.0) };
    }
}

struct Numeric(*mut c_void);

impl Drop for Numeric {
    fn drop(&mut self) {
        // SAFETY: created by umfpack_di_numeric and freed once.
        unsafe { umf::umfpack_di_free_numeric(&mut self.0) };
    }
}

/// Sparse LU solver that keeps the symbolic analysis of the last sparsity
/// pattern it factored.
pub struct DirectSolver {
    residual_bound: f64,
    cached: Option<(PatternKey, Symbolic)>,
}

// SAFETY: the UMFPACK objects are plain heap data owned exclusively by this
// value and carry no thread affinity.
unsafe impl Send for DirectSolver {}

impl Default for DirectSolver {
    fn default() -> Self {
        Self::new(DEFAULT_RESIDUAL_BOUND)
    }
}

impl fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectSolver")
            .field("residual_bound", &self.residual_bound)
            .field("cached", &self.cached.is_some())
            .finish()
    }
}

fn control(s: Strategy) -> [f64; umf::CONTROL] {
    let mut c = umf::defaults();
    c[umf::PRL] = 0.0;
    c[umf::STRATEGY] = s.strategy;
    c[umf::ORDERING] = umf::ORDERING_AMD;
    c[umf::PIVOT_TOLERANCE] = s.pivot_tolerance;
    c[umf::SYM_PIVOT_TOLERANCE] = s.pivot_tolerance.min(0.001);
    c[umf::SCALE] = s.scale;
    c[umf::IRSTEP] = 0.0;
    c
}

fn analyze(csc: &Csc, n: usize, ctrl: &[f64; umf::CONTROL]) -> Result<Symbolic> {
    let mut info = [0.0; umf::INFO];
    let mut sym = ptr::null_mut();
    // SAFETY: ap/ai/ax describe a valid n×n CSC matrix.
    let status = unsafe {
        umf::umfpack_di_symbolic(
            n as c_int,
            n as c_int,
            csc.ap.as_ptr(),
            csc.ai.as_ptr(),
            csc.ax.as_ptr(),
            &mut sym,
            ctrl.as_ptr(),
            info.as_mut_ptr(),
        )
    };
    if status != umf::OK || sym.is_null() {
        return Err(Error::Resource(format!("symbolic analysis failed (status {status})")));
    }
    Ok(Symbolic(sym))
}

fn factor(csc: &Csc, n: usize, sym: &Symbolic, ctrl: &[f64; umf::CONTROL]) -> Result<(Numeric, f64)> {
    let mut info = [0.0; umf::INFO];
    let mut num = ptr::null_mut();
    // SAFETY: `sym` was produced for this pattern.
    let status = unsafe {
        umf::umfpack_di_numeric(
            csc.ap.as_ptr(),
            csc.ai.as_ptr(),
            csc.ax.as_ptr(),
            sym.0,
            &mut num,
            ctrl.as_ptr(),
            info.as_mut_ptr(),
        )
    };
    if num.is_null() {
        return Err(Error::Resource(format!("numeric factorization failed (status {status})")));
    }
    let num = Numeric(num);
    match status {
        umf::OK => Ok((num, info[umf::RCOND])),
        umf::WARNING_SINGULAR_MATRIX => Err(Error::Singular {
            pivot: singular_column(&num, n),
        }),
        s => Err(Error::Resource(format!("numeric factorization failed (status {s})"))),
    }
}

/// Column of the first zero on the diagonal of `U`.
fn singular_column(num: &Numeric, n: usize) -> usize {
    let mut q: Vec<c_int> = vec![0; n];
    let mut dx = vec![0.0; n];
    let null_i = ptr::null_mut();
    let null_d = ptr::null_mut();
    // SAFETY: only Q and the diagonal are requested, both of length n.
    let status = unsafe {
        umf::umfpack_di_get_numeric(
            null_i,
            null_i,
            null_d,
            null_i,
            null_i,
            null_d,
            null_i,
            q.as_mut_ptr(),
            dx.as_mut_ptr(),
            null_i,
            null_d,
            num.0,
        )
    };
    if status != umf::OK {
        return 0;
    }
    dx.iter()
        .position(|&d| d == 0.0 || !d.is_finite())
        .map(|k| q[k].max(0) as usize)
        .unwrap_or(0)
}

impl DirectSolver {
    pub fn new(residual_bound: f64) -> Self {
        Self {
            residual_bound,
            cached: None,
        }
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    /// Solves `Ax = b`. Fails with a report attached when the relative
    /// residual cannot be brought under the bound.
    pub fn solve(&mut self, a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::input(format!("solve needs a square matrix, got {}x{}", n, a.ncols())));
        }
        if b.len() != n {
            return Err(Error::input(format!(
                "right-hand side has length {}, matrix has {n} rows",
                b.len()
            )));
        }
        let bnorm = norm(b);
        if n == 0 || bnorm == 0.0 {
            return Ok((
                vec![0.0; n],
                SolveReport {
                    relative_residual: 0.0,
                    status: FactorStatus::Factored,
                    rcond: 1.0,
                    dimension: n,
                },
            ));
        }

        let csc = Csc::from_csr(a)?;
        let key = a.pattern_key();
        let primary = control(PRIMARY);
        if !matches!(&self.cached, Some((k, _)) if *k == key) {
            self.cached = None;
            self.cached = Some((key, analyze(&csc, n, &primary)?));
        }
        let bound = self.residual_bound;
        let sym = &self.cached.as_ref().expect("symbolic analysis cached above").1;
        let first = match factor(&csc, n, sym, &primary) {
            Ok((num, rcond)) => Some(attempt(&num, rcond, &csc, a, b, bnorm, bound, &primary)?),
            Err(e @ Error::Singular { .. }) => {
                log::debug!("primary factorization singular, retrying: {e}");
                None
            }
            Err(e) => return Err(e),
        };
        if let Some(f) = &first {
            if f.1.relative_residual <= bound && f.1.rcond >= RCOND_GUARD {
                return Ok(first.expect("checked above"));
            }
            log::warn!("direct solve retrying after {}", f.1);
        }

        let retry = control(RETRY);
        let sym = analyze(&csc, n, &retry)?;
        let second = factor(&csc, n, &sym, &retry).and_then(|(num, rcond)| {
            attempt(&num, rcond, &csc, a, b, bnorm, bound, &retry)
        });
        let best = match (first, second) {
            (None, second) => second?,
            (Some(first), Err(_)) => first,
            (Some(first), Ok((x, mut report))) => {
                if report.relative_residual <= first.1.relative_residual {
                    report.status = FactorStatus::Retried;
                    (x, report)
                } else {
                    first
                }
            }
        };
        if best.1.relative_residual <= bound {
            Ok(best)
        } else {
            let mut report = best.1;
            report.status = FactorStatus::Failed;
            Err(Error::SolveFailed(report))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    num: &Numeric,
    rcond: f64,
    csc: &Csc,
    a: &CsrMatrix,
    b: &[f64],
    bnorm: f64,
    bound: f64,
    ctrl: &[f64; umf::CONTROL],
) -> Result<(Vec<f64>, SolveReport)> {
    let n = b.len();
    let solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let mut x = vec![0.0; n];
        let mut info = [0.0; umf::INFO];
        // SAFETY: x and rhs have n entries; the factors belong to this matrix.
        let status = unsafe {
            umf::umfpack_di_solve(
                umf::SYS_A,
                csc.ap.as_ptr(),
                csc.ai.as_ptr(),
                csc.ax.as_ptr(),
                x.as_mut_ptr(),
                rhs.as_ptr(),
                num.0,
                ctrl.as_ptr(),
                info.as_mut_ptr(),
            )
        };
        match status {
            umf::OK => Ok(x),
            s => Err(Error::Resource(format!("triangular solve failed (status {s})"))),
        }
    };

    let mut x = solve(b)?;
    let mut r = residual(a, &x, b);
    let mut rel = norm(&r) / bnorm;
    let mut steps = 0;
    while rel > bound * 1e-2 && steps < MAX_REFINEMENT && rel.is_finite() {
        let d = solve(&r)?;
        let trial: Vec<f64> = x.iter().zip(&d).map(|(a, d)| a + d).collect();
        let tr = residual(a, &trial, b);
        let trel = norm(&tr) / bnorm;
        if !(trel < rel) {
            break;
        }
        x = trial;
        r = tr;
        rel = trel;
        steps += 1;
    }
    Ok((
        x,
        SolveReport {
            relative_residual: if rel.is_finite() { rel } else { f64::INFINITY },
            status: if steps == 0 {
                FactorStatus::Factored
            } else {
                FactorStatus::Refined(steps)
            },
            rcond: if rcond.is_finite() { rcond } else { 0.0 },
            dimension: n,
        },
    ))
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(ax).map(|(b, y)| b - y).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One-shot solve without pattern reuse.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    DirectSolver::default().solve(a, b)
}
