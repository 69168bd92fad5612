//! Minimal bindings to SuiteSparse UMFPACK (32-bit index, real variant).

use std::os::raw::{c_int, c_void};

pub const CONTROL: usize = 20;
pub const INFO: usize = 90;

pub const PRL: usize = 0;
pub const PIVOT_TOLERANCE: usize = 3;
pub const STRATEGY: usize = 5;
pub const IRSTEP: usize = 7;
pub const ORDERING: usize = 10;
pub const SYM_PIVOT_TOLERANCE: usize = 15;
pub const SCALE: usize = 16;

pub const RCOND: usize = 67;

pub const STRATEGY_UNSYMMETRIC: f64 = 1.0;
pub const STRATEGY_SYMMETRIC: f64 = 3.0;
pub const ORDERING_AMD: f64 = 1.0;
pub const SCALE_SUM: f64 = 1.0;
pub const SCALE_MAX: f64 = 2.0;

pub const OK: c_int = 0;
pub const WARNING_SINGULAR_MATRIX: c_int = 1;
pub const SYS_A: c_int = 0;

#[link(name = "umfpack")]
extern "C" {
    pub fn umfpack_di_defaults(control: *mut f64);
    pub fn umfpack_di_symbolic(
        n_row: c_int,
        n_col: c_int,
        ap: *const c_int,
        ai: *const c_int,
        ax: *const f64,
        symbolic: *mut *mut c_void,
        control: *const f64,
        info: *mut f64,
    ) -> c_int;
    pub fn umfpack_di_numeric(
        ap: *const c_int,
        ai: *const c_int,
        ax: *const f64,
        symbolic: *mut c_void,
        numeric: *mut *mut c_void,
        control: *const f64,
        info: *mut f64,
    ) -> c_int;
    pub fn umfpack_di_solve(
        sys: c_int,
        ap: *const c_int,
        ai: *const c_int,
        ax: *const f64,
        x: *mut f64,
        b: *const f64,
        numeric: *mut c_void,
        control: *const f64,
        info: *mut f64,
    ) -> c_int;
    pub fn umfpack_di_get_numeric(
        lp: *mut c_int,
        lj: *mut c_int,
        lx: *mut f64,
        up: *mut c_int,
        ui: *mut c_int,
        ux: *mut f64,
        p: *mut c_int,
        q: *mut c_int,
        dx: *mut f64,
        do_recip: *mut c_int,
        rs: *mut f64,
        numeric: *mut c_void,
    ) -> c_int;
    pub fn umfpack_di_free_symbolic(symbolic: *mut *mut c_void);
    pub fn umfpack_di_free_numeric(numeric: *mut *mut c_void);
}

pub fn defaults() -> [f64; CONTROL] {
    let mut c = [0.0; CONTROL];
    // SAFETY: the array has the documented length.
    unsafe { umfpack_di_defaults(c.as_mut_ptr()) };
    c
}
