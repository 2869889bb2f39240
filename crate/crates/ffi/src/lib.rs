//! C ABI over the boussfrac laboratory.
//!
//! Every function returns a `BfStatus`; results come back through out
//! pointers. Handles are opaque and must be released with the matching
//! `bf_*_free`. The message of the last failure on the calling thread is
//! available from `bf_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use boussfrac::dynamics::{evolve, kernel_properties, EvolveOptions, KernelSpec, Model, State};
use boussfrac::entropy::{build_monitors, entropy_total, MonitorContext};
use boussfrac::experiments::{data_of, run_study, StudyKind, StudySpec};
use boussfrac::io::{RunReport, SolverConfig};
use boussfrac::spectral::{Grid, SpectralField};
use boussfrac::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    BlowUp = 5,
    Io = 6,
    Counterexample = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Solver configuration.
pub struct BfConfig(SolverConfig);

/// A `(zeta, u, t)` state on a periodic grid.
pub struct BfState(State);

/// Time series, verdicts and metadata of one run or study.
pub struct BfReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BfStatus {
    match e {
        Error::Parameter { .. } | Error::GridMismatch | Error::ScaleOutOfRange { .. } | Error::SingularMultiplier { .. } => {
            BfStatus::InvalidArgument
        }
        Error::Config(_) => BfStatus::Config,
        Error::Domain(_) => BfStatus::Domain,
        Error::BlowUp { .. } => BfStatus::BlowUp,
        Error::Io { .. } | Error::Json(_) | Error::Csv(_) => BfStatus::Io,
        Error::Counterexample { .. } => BfStatus::Counterexample,
    }
}

fn fail(e: Error) -> BfStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> BfStatus) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            BfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, BfStatus> {
    if p.is_null() {
        set_error(&format!("{name} is null"));
        return Err(BfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid UTF-8"));
        BfStatus::InvalidArgument
    })
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!(stringify!($p), " is null"));
            return BfStatus::NullPointer;
        })+
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

/// Copies `s` plus a terminating NUL into `buf`; `*len` receives the
/// required size including the NUL.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, len: *mut usize) -> BfStatus {
    let need = s.len() + 1;
    if !len.is_null() {
        *len = need;
    }
    if buf.is_null() || cap < need {
        set_error(&format!("buffer of {cap} bytes, {need} needed"));
        return BfStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    BfStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failure on this thread; valid until the next call
/// that fails on the same thread.
#[no_mangle]
pub extern "C" fn bf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_config_new(out: *mut *mut BfConfig) -> BfStatus {
    nonnull!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(BfConfig(SolverConfig::default())));
        BfStatus::Ok
    })
}

/// Sets one `key = value` entry using the config-file syntax.
///
/// # Safety
/// `cfg` must come from `bf_config_new`; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn bf_config_set(cfg: *mut BfConfig, key: *const c_char, value: *const c_char) -> BfStatus {
    nonnull!(cfg);
    guard(|| {
        let k = match str_arg(key, "key") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let v = match str_arg(value, "value") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let c = &mut (*cfg).0;
        tri!(c.set(k, v));
        tri!(c.validate());
        BfStatus::Ok
    })
}

/// # Safety
/// `cfg` must come from `bf_config_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn bf_config_free(cfg: *mut BfConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Initial data selected by the configuration's `data` key.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_state_from_config(cfg: *const BfConfig, out: *mut *mut BfState) -> BfStatus {
    nonnull!(cfg, out);
    guard(|| {
        let c = &(*cfg).0;
        let grid = tri!(Grid::new(c.half_length, c.n_modes));
        let s = tri!(data_of(c, c.data).build(&grid));
        *out = Box::into_raw(Box::new(BfState(s)));
        BfStatus::Ok
    })
}

/// State from `n` samples of `zeta` and `u` on `[-half_length, half_length)`.
///
/// # Safety
/// `zeta` and `u` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bf_state_new(
    half_length: f64,
    n: usize,
    zeta: *const f64,
    u: *const f64,
    out: *mut *mut BfState,
) -> BfStatus {
    nonnull!(zeta, u, out);
    guard(|| {
        let grid: Arc<Grid> = tri!(Grid::new(half_length, n));
        let z = tri!(SpectralField::from_samples(&grid, std::slice::from_raw_parts(zeta, n).to_vec()));
        let v = tri!(SpectralField::from_samples(&grid, std::slice::from_raw_parts(u, n).to_vec()));
        *out = Box::into_raw(Box::new(BfState(tri!(State::new(z, v, 0.0)))));
        BfStatus::Ok
    })
}

/// Number of grid nodes.
///
/// # Safety
/// `state` must be live and `n` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_state_len(state: *const BfState, n: *mut usize) -> BfStatus {
    nonnull!(state, n);
    *n = (*state).0.grid().len();
    BfStatus::Ok
}

/// Copies the samples of `zeta` and `u` into arrays of length `n`.
///
/// # Safety
/// `zeta` and `u` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn bf_state_samples(state: *const BfState, zeta: *mut f64, u: *mut f64, n: usize) -> BfStatus {
    nonnull!(state, zeta, u);
    guard(|| {
        let s = &(*state).0;
        let len = s.grid().len();
        if n < len {
            set_error(&format!("arrays of {n} entries, {len} needed"));
            return BfStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(s.zeta.samples().as_ptr(), zeta, len);
        ptr::copy_nonoverlapping(s.u.samples().as_ptr(), u, len);
        BfStatus::Ok
    })
}

/// Time stamp and total entropy of a state.
///
/// # Safety
/// `state` must be live; `t` and `entropy` may be null.
#[no_mangle]
pub unsafe extern "C" fn bf_state_info(state: *const BfState, t: *mut f64, entropy: *mut f64) -> BfStatus {
    nonnull!(state);
    guard(|| {
        let s = &(*state).0;
        if !t.is_null() {
            *t = s.t;
        }
        if !entropy.is_null() {
            *entropy = entropy_total(s);
        }
        BfStatus::Ok
    })
}

/// # Safety
/// `state` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bf_state_free(state: *mut BfState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Evolves `state` to the configured final time with the configured
/// monitors. `report` and `final_state` may be null when not wanted.
///
/// # Safety
/// Handles must be live; out pointers valid or null.
#[no_mangle]
pub unsafe extern "C" fn bf_evolve(
    cfg: *const BfConfig,
    state: *const BfState,
    report: *mut *mut BfReport,
    final_state: *mut *mut BfState,
) -> BfStatus {
    nonnull!(cfg, state);
    guard(|| {
        let c = &(*cfg).0;
        let ctx = MonitorContext { params: c.params(), s: c.s };
        let mut mons = build_monitors(&c.monitors, &ctx);
        let mut opts = EvolveOptions::new(c.t_final)
            .scheme(c.scheme)
            .sample_interval(c.sample_interval)
            .sobolev_index(c.s);
        if let Some(dt) = c.dt {
            opts = opts.dt(dt);
        }
        let tr = tri!(evolve(&(*state).0, &Model::new(c.params()), &opts, &mut mons));
        if !report.is_null() {
            *report = Box::into_raw(Box::new(BfReport(RunReport::from_trajectory("simulate", c, &tr))));
        }
        if !final_state.is_null() {
            *final_state = Box::into_raw(Box::new(BfState(tr.final_state)));
        }
        BfStatus::Ok
    })
}

/// Runs a study by its CLI name (`converge-eps`, `bona-smith`, ...).
///
/// # Safety
/// `cfg` must be live, `study` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_study_run(cfg: *const BfConfig, study: *const c_char, out: *mut *mut BfReport) -> BfStatus {
    nonnull!(cfg, out);
    guard(|| {
        let name = match str_arg(study, "study") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let kind = match StudyKind::parse(name) {
            Some(k) => k,
            None => {
                set_error(&format!("unknown study `{name}`"));
                return BfStatus::InvalidArgument;
            }
        };
        let c = (*cfg).0.clone();
        let r = tri!(run_study(&StudySpec { kind, config: c.clone() }));
        *out = Box::into_raw(Box::new(BfReport(RunReport::from_study(&c, r))));
        BfStatus::Ok
    })
}

/// `|K|_{L^1}` and `|K_x|_{L^1} (eps t)^{1/lambda}` of the kernel of
/// `exp(-eps t |xi|^lambda)`. Either out pointer may be null.
///
/// # Safety
/// Out pointers valid or null.
#[no_mangle]
pub unsafe extern "C" fn bf_kernel_norms(lambda: f64, eps: f64, t: f64, l1: *mut f64, dx_scaled: *mut f64) -> BfStatus {
    guard(|| {
        let spec = tri!(KernelSpec::new(lambda, eps, t));
        let r = tri!(kernel_properties(&spec));
        if !l1.is_null() {
            *l1 = r.l1_norm;
        }
        if !dx_scaled.is_null() {
            *dx_scaled = r.dx_l1_scaled;
        }
        BfStatus::Ok
    })
}

/// 1 if every verdict passed, else 0.
///
/// # Safety
/// `report` must be live and `pass` valid.
#[no_mangle]
pub unsafe extern "C" fn bf_report_pass(report: *const BfReport, pass: *mut c_int) -> BfStatus {
    nonnull!(report, pass);
    *pass = c_int::from((*report).0.pass);
    BfStatus::Ok
}

/// Writes the report as JSON into `buf`. With a null or short buffer the
/// call fails with `BufferTooSmall` and `*len` holds the size needed.
///
/// # Safety
/// `buf` must hold `cap` bytes or be null; `len` valid or null.
#[no_mangle]
pub unsafe extern "C" fn bf_report_json(report: *const BfReport, buf: *mut c_char, cap: usize, len: *mut usize) -> BfStatus {
    nonnull!(report);
    guard(|| {
        let s = tri!((*report).0.to_json());
        write_str(&s, buf, cap, len)
    })
}

/// Same as `bf_report_json` for the CSV table.
///
/// # Safety
/// As `bf_report_json`.
#[no_mangle]
pub unsafe extern "C" fn bf_report_csv(report: *const BfReport, buf: *mut c_char, cap: usize, len: *mut usize) -> BfStatus {
    nonnull!(report);
    guard(|| {
        let s = tri!((*report).0.to_csv());
        write_str(&s, buf, cap, len)
    })
}

/// # Safety
/// `report` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn bf_report_free(report: *mut BfReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs the command-line front end on `argv[0..argc]` and returns its exit
/// code (0 pass, 2 fail, 1 usage or configuration error).
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn bf_cli_run(argc: c_int, argv: *const *const c_char) -> c_int {
    if argv.is_null() || argc < 1 {
        return boussfrac::io::EXIT_USAGE;
    }
    let args: Vec<String> = (0..argc as usize)
        .map(|i| {
            let p = *argv.add(i);
            if p.is_null() {
                String::new()
            } else {
                CStr::from_ptr(p).to_string_lossy().into_owned()
            }
        })
        .collect();
    catch_unwind(|| boussfrac::io::run(args)).unwrap_or(boussfrac::io::EXIT_USAGE)
}
