//! C ABI over `grover-cost`.
//!
//! Every function returns a [`GcStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and read back with
//! [`gc_last_error_message`]. Instances and ledgers are opaque handles that the
//! caller releases with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};

use grover_cost::bounds::{self, CostModel, SearchRegime};
use grover_cost::hillclimb::{run_climber, ClimberConfig, Mode, QueryLedger, Variant};
use grover_cost::maxsat::{generate_instance, objective, read_instance, Assignment, MaxSatInstance};
use grover_cost::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    /// The quantity does not exist, e.g. no crossover on this list.
    NoValue = 3,
    Parse = 4,
    Io = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcVariant {
    Simple = 0,
    Steep = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcMode {
    Classical = 0,
    QuantumExact = 1,
    QuantumSampled = 2,
}

/// Weighted MAX-k-SAT instance.
pub struct GcInstance(MaxSatInstance);

/// Query ledger of one climber run.
pub struct GcLedger(QueryLedger);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GcLedgerSummary {
    pub total_classical: f64,
    pub total_quantum: f64,
    pub steps: u64,
    pub soft_failures: u64,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub satisfied_fraction: f64,
    pub epsilon_step: f64,
    pub peak_memory_entries: u64,
    pub converged: bool,
    pub budget_exceeded: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GcStatus {
    match err {
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) | Error::Spec(_) => GcStatus::Parse,
        Error::Io(_) => GcStatus::Io,
        _ => GcStatus::InvalidArgument,
    }
}

/// Runs `f`, storing its error or panic message for [`gc_last_error_message`].
fn guard<F: FnOnce() -> Result<(), (GcStatus, String)>>(f: F) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GcStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            GcStatus::Internal
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (GcStatus, String)>;
}

impl<T> IntoFfi<T> for grover_cost::Result<T> {
    fn ffi(self) -> Result<T, (GcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(name: &str) -> (GcStatus, String) {
    (GcStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), (GcStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    // SAFETY: nonnull and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn borrow<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, (GcStatus, String)> {
    // SAFETY: caller passes a handle from this library or null.
    unsafe { ptr.as_ref() }.ok_or_else(|| null(name))
}

fn model(c_q: f64) -> Result<CostModel, (GcStatus, String)> {
    CostModel::with_cq(c_q).ffi()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Expected oracle queries of the unbounded search, `1 <= marked <= list_size`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_f_upper(list_size: u64, marked: u64, out: *mut f64) -> GcStatus {
    guard(|| unsafe { write(out, bounds::f_upper(list_size, marked).ffi()?, "out") })
}

/// Expected oracle queries of the timed-out Grover runs.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_e_grover_upper(list_size: u64, marked: u64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| {
        let regime = SearchRegime::new(list_size, marked).ffi()?;
        let v = bounds::e_grover_upper(regime, &model(c_q)?).ffi()?;
        unsafe { write(out, v, "out") }
    })
}

/// Expected queries to `g` of the bounded search.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_e_qsearch(
    list_size: u64,
    marked: u64,
    n_samples: u64,
    epsilon: f64,
    c_q: f64,
    out: *mut f64,
) -> GcStatus {
    guard(|| {
        let regime = SearchRegime::new(list_size, marked).ffi()?;
        let v = bounds::e_qsearch(regime, n_samples, epsilon, &model(c_q)?).ffi()?;
        unsafe { write(out, v.queries, "out") }
    })
}

/// Worst-case queries to `g` of the bounded search.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_w_qsearch(
    list_size: u64,
    n_samples: u64,
    epsilon: f64,
    c_q: f64,
    out: *mut f64,
) -> GcStatus {
    guard(|| {
        let v = bounds::w_qsearch(list_size, n_samples, epsilon, &model(c_q)?).ffi()?;
        unsafe { write(out, v.queries, "out") }
    })
}

/// Worst-case queries of the exact-search variant.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_w_qsearch_zalka(list_size: u64, epsilon: f64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| {
        let v = bounds::w_qsearch_zalka(list_size, epsilon, &model(c_q)?).ffi()?;
        unsafe { write(out, v.queries, "out") }
    })
}

/// `1/f0` where classical sampling and Grover cost the same. Returns
/// `GC_STATUS_NO_VALUE` when Grover never wins on this list.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_crossover(list_size: u64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| match bounds::crossover_fraction(list_size, &model(c_q)?) {
        Some(v) => unsafe { write(out, v, "out") },
        None => Err((GcStatus::NoValue, format!("no crossover for |L| = {list_size}"))),
    })
}

/// Classical sample budget minimising the averaged search cost.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_optimal_n_samples(list_size: u64, c_q: f64, out: *mut u64) -> GcStatus {
    guard(|| {
        let v = bounds::optimal_n_samples(list_size, &model(c_q)?);
        unsafe { write(out, v, "out") }
    })
}

/// Expected queries of unbounded maximum finding (exact sum).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_qmax_inf_sum(list_size: u64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| {
        let v = bounds::e_qmax_inf_sum(list_size, &model(c_q)?);
        unsafe { write(out, v, "out") }
    })
}

/// Loose closed form for unbounded maximum finding.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_qmax_loose(list_size: u64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| {
        let v = bounds::e_qmax_loose(list_size, &model(c_q)?);
        unsafe { write(out, v, "out") }
    })
}

/// Tight closed form for unbounded maximum finding, `list_size >= 17`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_qmax_tight(list_size: u64, c_q: f64, out: *mut f64) -> GcStatus {
    guard(|| {
        let v = bounds::e_qmax_tight(list_size, &model(c_q)?).ffi()?;
        unsafe { write(out, v, "out") }
    })
}

fn into_handle(instance: MaxSatInstance) -> *mut GcInstance {
    Box::into_raw(Box::new(GcInstance(instance)))
}

/// Random instance: `round(r n)` clauses of `k` distinct variables.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_generate(
    n: usize,
    k: usize,
    r: f64,
    seed: u64,
    out: *mut *mut GcInstance,
) -> GcStatus {
    guard(|| {
        let inst = generate_instance(n, k, r, seed).ffi()?;
        unsafe { write(out, into_handle(inst), "out") }
    })
}

/// Instance from `m` clauses of `k` signed 1-based literals each, laid out
/// row by row in `literals`, and `m` weights.
///
/// # Safety
/// `literals` must point to `m * k` values and `weights` to `m` values.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_from_literals(
    n: usize,
    k: usize,
    m: usize,
    literals: *const i64,
    weights: *const f64,
    out: *mut *mut GcInstance,
) -> GcStatus {
    guard(|| {
        if m > 0 && (literals.is_null() || weights.is_null()) {
            return Err(null("literals/weights"));
        }
        let total = m
            .checked_mul(k)
            .ok_or_else(|| (GcStatus::InvalidArgument, "m * k overflows".into()))?;
        let (lits, ws) = if m == 0 {
            (&[][..], &[][..])
        } else {
            // SAFETY: lengths per the contract above.
            unsafe {
                (
                    std::slice::from_raw_parts(literals, total),
                    std::slice::from_raw_parts(weights, m),
                )
            }
        };
        let rows: Vec<Vec<i64>> = lits.chunks(k.max(1)).map(<[i64]>::to_vec).collect();
        let inst = MaxSatInstance::from_literals(n, k, &rows, ws.to_vec()).ffi()?;
        unsafe { write(out, into_handle(inst), "out") }
    })
}

/// Reads an instance file in the `p wknf` text format.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_read(path: *const c_char, out: *mut *mut GcInstance) -> GcStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        // SAFETY: NUL-terminated per the contract.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| (GcStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let file = File::open(path).map_err(|e| (GcStatus::Io, format!("{path}: {e}")))?;
        let inst = read_instance(BufReader::new(file)).ffi()?;
        unsafe { write(out, into_handle(inst), "out") }
    })
}

/// Releases an instance; null is ignored.
///
/// # Safety
/// `instance` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_free(instance: *mut GcInstance) {
    if !instance.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(instance) });
    }
}

/// Writes the variable count, clause count and clause width.
///
/// # Safety
/// `instance` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_shape(
    instance: *const GcInstance,
    n: *mut usize,
    m: *mut usize,
    k: *mut usize,
) -> GcStatus {
    guard(|| {
        let inst = unsafe { borrow(instance, "instance") }?;
        unsafe {
            write(n, inst.0.n(), "n")?;
            write(m, inst.0.m(), "m")?;
            write(k, inst.0.k(), "k")
        }
    })
}

/// Weighted satisfied clauses of `values` (one byte per variable, nonzero is
/// true).
///
/// # Safety
/// `values` must point to `len` bytes; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_instance_objective(
    instance: *const GcInstance,
    values: *const u8,
    len: usize,
    out: *mut f64,
) -> GcStatus {
    guard(|| {
        let inst = unsafe { borrow(instance, "instance") }?;
        if values.is_null() && len > 0 {
            return Err(null("values"));
        }
        let bytes = if len == 0 {
            &[][..]
        } else {
            // SAFETY: `len` bytes per the contract.
            unsafe { std::slice::from_raw_parts(values, len) }
        };
        let bools: Vec<bool> = bytes.iter().map(|&b| b != 0).collect();
        let v = objective(&inst.0, &Assignment::from_bools(&bools)).ffi()?;
        unsafe { write(out, v, "out") }
    })
}

/// Runs a hill climber from a seeded random start. `epsilon_total` is the
/// failure budget over the whole run, `c_q` the oracle cost.
///
/// # Safety
/// `instance` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_climb(
    instance: *const GcInstance,
    variant: GcVariant,
    mode: GcMode,
    seed: u64,
    epsilon_total: f64,
    c_q: f64,
    out: *mut *mut GcLedger,
) -> GcStatus {
    guard(|| {
        let inst = unsafe { borrow(instance, "instance") }?;
        let variant = match variant {
            GcVariant::Simple => Variant::Simple,
            GcVariant::Steep => Variant::Steep,
        };
        let mode = match mode {
            GcMode::Classical => Mode::Classical,
            GcMode::QuantumExact => Mode::QuantumExact,
            GcMode::QuantumSampled => Mode::QuantumSampled,
        };
        let mut config = ClimberConfig::new(variant, mode, seed);
        config.epsilon_total = epsilon_total;
        config.model = model(c_q)?;
        let ledger = run_climber(&inst.0, &config).ffi()?;
        unsafe { write(out, Box::into_raw(Box::new(GcLedger(ledger))), "out") }
    })
}

/// Totals and end state of a climber run.
///
/// # Safety
/// `ledger` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_ledger_summary(ledger: *const GcLedger, out: *mut GcLedgerSummary) -> GcStatus {
    guard(|| {
        let l = &unsafe { borrow(ledger, "ledger") }?.0;
        let summary = GcLedgerSummary {
            total_classical: l.total_classical,
            total_quantum: l.total_quantum,
            steps: l.steps_taken,
            soft_failures: l.soft_failures,
            initial_objective: l.initial_objective,
            final_objective: l.final_objective,
            satisfied_fraction: l.satisfied_fraction(),
            epsilon_step: l.epsilon_step,
            peak_memory_entries: l.peak_memory_entries as u64,
            converged: l.converged,
            budget_exceeded: l.budget_exceeded,
        };
        unsafe { write(out, summary, "out") }
    })
}

/// Per-step quantum charges, copied into `buf` up to `cap` entries. `len`
/// receives the full step count, including the final confirmation.
///
/// # Safety
/// `ledger` must be a live handle; `buf` valid for `cap` writes (or null with
/// `cap == 0`); `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_ledger_step_costs(
    ledger: *const GcLedger,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> GcStatus {
    guard(|| {
        let l = &unsafe { borrow(ledger, "ledger") }?.0;
        if buf.is_null() && cap > 0 {
            return Err(null("buf"));
        }
        for (i, s) in l.per_step.iter().take(cap).enumerate() {
            // SAFETY: i < cap.
            unsafe { buf.add(i).write(s.quantum_queries) };
        }
        unsafe { write(len, l.per_step.len(), "len") }
    })
}

/// Releases a ledger; null is ignored.
///
/// # Safety
/// `ledger` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gc_ledger_free(ledger: *mut GcLedger) {
    if !ledger.is_null() {
        // SAFETY: created by Box::into_raw in `gc_climb`.
        drop(unsafe { Box::from_raw(ledger) });
    }
}
