//! C ABI over `cimqubo`.
//!
//! Every fallible call returns a [`CqStatus`] and writes results through out
//! pointers. On failure [`cq_last_error`] returns a message for the calling
//! thread. Handles are opaque and must be released with their `_free`
//! function. Bit vectors cross the boundary as `const uint8_t*` arrays with
//! one byte per bit (0 or nonzero).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cimqubo::anneal::{initial_configuration, run_seed, Annealer, Backend, Problem};
use cimqubo::bench::overhead_report;
use cimqubo::bits::BitVector;
use cimqubo::filter::{FilterConfig, FilterModel};
use cimqubo::qkp::{
    brute_force_oracle, generate_instance, parse_instance, serialize_instance, GeneratorParams, InstanceFormat,
    QkpInstance,
};
use cimqubo::qubo::{build_dqubo, build_inequality_qubo, DQuboModel, InequalityQuboModel};
use cimqubo::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Dimension = 5,
    Capacity = 6,
    Overflow = 7,
    Sampling = 8,
    Config = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqFormat {
    Text = 0,
    Json = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqMode {
    Inequality = 0,
    Dqubo = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CqRunSummary {
    pub best_energy: i64,
    pub best_qkp_value: i64,
    pub best_feasible: bool,
    pub filter_rejections: u64,
    pub evaluations: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CqFilterDecision {
    pub feasible: bool,
    pub working_ml: f64,
    pub replica_ml: f64,
}

/// Penalty fields are 0 (`dqubo_available == false`) when that matrix cannot be built.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CqOverhead {
    pub n: usize,
    pub capacity: i64,
    pub ineq_bits: u32,
    pub ineq_cells: u64,
    pub dqubo_available: bool,
    pub dqubo_dim: usize,
    pub dqubo_bits: u32,
    pub dqubo_cells: u64,
    pub saving_fraction: f64,
}

pub struct CqInstance {
    inner: QkpInstance,
}

pub struct CqInequalityModel {
    inner: InequalityQuboModel,
}

pub struct CqDquboModel {
    inner: DQuboModel,
}

pub struct CqFilter {
    inner: FilterModel,
}

struct Failure(CqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => CqStatus::Parse,
            Error::Validation { .. } => CqStatus::Validation,
            Error::Dimension { .. } => CqStatus::Dimension,
            Error::Capacity(_) => CqStatus::Capacity,
            Error::Overflow(_) => CqStatus::Overflow,
            Error::Sampling { .. } => CqStatus::Sampling,
            Error::Config(_) => CqStatus::Config,
            Error::Io(_) => CqStatus::Io,
            Error::Json(_) => CqStatus::Parse,
            Error::Csv(_) => CqStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CqStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_bits(bits: *const u8, len: usize) -> Result<BitVector, Failure> {
    if len == 0 {
        return Ok(BitVector::zeros(0));
    }
    if bits.is_null() {
        return Err(null("bits"));
    }
    Ok(std::slice::from_raw_parts(bits, len).iter().map(|&b| b != 0).collect())
}

unsafe fn write_bits(out: *mut u8, x: &BitVector) {
    if !out.is_null() {
        for (i, b) in x.iter().enumerate() {
            out.add(i).write(b as u8);
        }
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn cq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_parse(
    text: *const c_char,
    format: CqFormat,
    out: *mut *mut CqInstance,
) -> CqStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(CqStatus::InvalidArgument, format!("text is not UTF-8: {e}")))?;
        let format = match format {
            CqFormat::Text => InstanceFormat::CanonicalText,
            CqFormat::Json => InstanceFormat::Json,
        };
        let inner = parse_instance(text, format)?;
        write(out, boxed(CqInstance { inner }), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_generate(
    n: usize,
    density: f64,
    wmax: i64,
    pmax: i64,
    cap_ratio: f64,
    seed: u64,
    out: *mut *mut CqInstance,
) -> CqStatus {
    guard(|| {
        let inner = generate_instance(GeneratorParams {
            n,
            density,
            wmax,
            pmax,
            cap_ratio,
            seed,
        })?;
        write(out, boxed(CqInstance { inner }), "out")
    })
}

/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_free(inst: *mut CqInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of items; 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_n(inst: *const CqInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

/// Capacity; 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_capacity(inst: *const CqInstance) -> i64 {
    inst.as_ref().map_or(0, |i| i.inner.capacity())
}

/// Serializes to a new string; free it with [`cq_string_free`].
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_serialize(
    inst: *const CqInstance,
    format: CqFormat,
    out: *mut *mut c_char,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let format = match format {
            CqFormat::Text => InstanceFormat::CanonicalText,
            CqFormat::Json => InstanceFormat::Json,
        };
        let text = serialize_instance(&inst.inner, format)?;
        let c = CString::new(text).map_err(|e| Failure(CqStatus::InvalidArgument, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// Unconstrained objective `Σ p_ij x_i x_j`.
///
/// # Safety
/// `inst` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_instance_objective(
    inst: *const CqInstance,
    bits: *const u8,
    len: usize,
    out: *mut i64,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let x = read_bits(bits, len)?;
        write(out, inst.inner.objective(&x)?, "out")
    })
}

/// Exhaustive optimum. `out_config` may be NULL or hold `n` bytes.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn cq_oracle(
    inst: *const CqInstance,
    out_value: *mut i64,
    out_config: *mut u8,
    out_feasible_count: *mut u64,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let r = brute_force_oracle(&inst.inner)?;
        write(out_value, r.best_value, "out_value")?;
        write_bits(out_config, &r.best_config);
        if !out_feasible_count.is_null() {
            out_feasible_count.write(r.feasible_count);
        }
        Ok(())
    })
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_inequality_build(inst: *const CqInstance, out: *mut *mut CqInequalityModel) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let inner = build_inequality_qubo(&inst.inner);
        write(out, boxed(CqInequalityModel { inner }), "out")
    })
}

/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_inequality_free(m: *mut CqInequalityModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Constrained energy: `xᵀQx` when feasible, 0 otherwise.
///
/// # Safety
/// `m` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_inequality_energy(
    m: *const CqInequalityModel,
    bits: *const u8,
    len: usize,
    out: *mut i64,
) -> CqStatus {
    guard(|| {
        let m = deref(m, "model")?;
        let x = read_bits(bits, len)?;
        write(out, m.inner.constrained_energy(&x)?, "out")
    })
}

/// Crossbar bit width; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_inequality_bits(m: *const CqInequalityModel) -> u32 {
    m.as_ref().map_or(0, |m| m.inner.quantization().bits)
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_dqubo_build(
    inst: *const CqInstance,
    alpha: i64,
    beta: i64,
    out: *mut *mut CqDquboModel,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let inner = build_dqubo(&inst.inner, alpha, beta)?;
        write(out, boxed(CqDquboModel { inner }), "out")
    })
}

/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_dqubo_free(m: *mut CqDquboModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix dimension `n + C`; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_dqubo_dim(m: *const CqDquboModel) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dim())
}

/// Crossbar bit width; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_dqubo_bits(m: *const CqDquboModel) -> u32 {
    m.as_ref().map_or(0, |m| m.inner.quantization().bits)
}

/// Penalty energy over all `n + C` bits.
///
/// # Safety
/// `m` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_dqubo_energy(
    m: *const CqDquboModel,
    bits: *const u8,
    len: usize,
    out: *mut i64,
) -> CqStatus {
    guard(|| {
        let m = deref(m, "model")?;
        let z = read_bits(bits, len)?;
        write(out, m.inner.energy(&z)?, "out")
    })
}

/// Filter with default geometry; `noise_sigma` 0 is exact.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_filter_build(
    inst: *const CqInstance,
    rows: usize,
    levels: u32,
    vdd: f64,
    noise_sigma: f64,
    out: *mut *mut CqFilter,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let config = FilterConfig {
            rows,
            levels,
            vdd,
            noise_sigma,
            ..FilterConfig::default()
        };
        let inner = FilterModel::for_instance(&inst.inner, &config)?;
        write(out, boxed(CqFilter { inner }), "out")
    })
}

/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_filter_free(f: *mut CqFilter) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Classifies `bits`; `seed` drives the noise draw when the filter is noisy.
///
/// # Safety
/// `f` must be a live handle, `bits` must hold `len` bytes, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_filter_check(
    f: *const CqFilter,
    bits: *const u8,
    len: usize,
    seed: u64,
    out: *mut CqFilterDecision,
) -> CqStatus {
    guard(|| {
        let f = deref(f, "filter")?;
        let x = read_bits(bits, len)?;
        let d = f.inner.check(&x, Some(seed))?;
        write(
            out,
            CqFilterDecision {
                feasible: d.feasible,
                working_ml: d.working_ml,
                replica_ml: d.replica_ml,
            },
            "out",
        )
    })
}

/// One annealing run from the seeded initial configuration 0 with the
/// default schedule. `cim` selects the noiseless behavioral backend.
/// `out_config` may be NULL or hold the model dimension in bytes.
///
/// # Safety
/// Pointers must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn cq_anneal(
    inst: *const CqInstance,
    mode: CqMode,
    iterations: usize,
    seed: u64,
    cim: bool,
    out: *mut CqRunSummary,
    out_config: *mut u8,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let backend = if cim {
            Backend::cim(FilterConfig::default(), 0.0)
        } else {
            Backend::exact()
        };
        let ineq;
        let pen;
        let problem = match mode {
            CqMode::Inequality => {
                ineq = build_inequality_qubo(&inst.inner);
                Problem::Inequality(&ineq)
            }
            CqMode::Dqubo => {
                pen = build_dqubo(&inst.inner, 2, 2)?;
                Problem::Dqubo(&pen)
            }
        };
        let annealer = Annealer::new(problem, backend)?;
        let init = initial_configuration(problem.dim(), seed, 0);
        let rec = annealer.run(
            &annealer.default_schedule(iterations),
            &init,
            run_seed(seed, 0, 0),
            false,
        )?;
        write_bits(out_config, &rec.best_config);
        write(
            out,
            CqRunSummary {
                best_energy: rec.best_energy,
                best_qkp_value: rec.best_qkp_value,
                best_feasible: rec.best_feasible,
                filter_rejections: rec.filter_rejections,
                evaluations: rec.evaluations,
            },
            "out",
        )
    })
}

/// Bit-width and cell-count comparison with a `rows`-row filter.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_overhead(
    inst: *const CqInstance,
    rows: usize,
    alpha: i64,
    beta: i64,
    out: *mut CqOverhead,
) -> CqStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let config = FilterConfig {
            rows,
            ..FilterConfig::default()
        };
        let r = overhead_report(&inst.inner, &config, alpha, beta);
        write(
            out,
            CqOverhead {
                n: r.n,
                capacity: r.capacity,
                ineq_bits: r.ineq_bits,
                ineq_cells: r.ineq_cells,
                dqubo_available: r.dqubo_dim.is_some(),
                dqubo_dim: r.dqubo_dim.unwrap_or(0),
                dqubo_bits: r.dqubo_bits.unwrap_or(0),
                dqubo_cells: r.dqubo_cells.unwrap_or(0),
                saving_fraction: r.saving_fraction.unwrap_or(0.0),
            },
            "out",
        )
    })
}
