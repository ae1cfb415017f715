//! C ABI over `moduli-betti`.
//!
//! Every function returns an [`MbStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`mb_last_error`]. Tables are opaque and must be released with
//! [`mb_betti_table_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use moduli_betti::betti::{self, BettiTable};
use moduli_betti::bounds;
use moduli_betti::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    NotCoprime = 1,
    InvalidArgument = 2,
    WindowExhausted = 3,
    Math = 4,
    NullPointer = 5,
    Overflow = 6,
    NotFound = 7,
    Panic = 8,
}

/// Opaque table of `b_2N(M(r, aH, c_2))`.
pub struct MbBettiTable {
    inner: BettiTable,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> MbStatus {
    match e {
        Error::NotCoprime { .. } => MbStatus::NotCoprime,
        Error::InvalidArgument(_) | Error::ExcludedCase(_) => MbStatus::InvalidArgument,
        Error::WindowExhausted(_) | Error::OutOfWindow { .. } | Error::WindowMismatch(..) => {
            MbStatus::WindowExhausted
        }
        _ => MbStatus::Math,
    }
}

fn guard<F: FnOnce() -> Result<(), (MbStatus, String)> + UnwindSafe>(f: F) -> MbStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => MbStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            MbStatus::Panic
        }
    }
}

fn lift(e: Error) -> (MbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MbStatus, String) {
    (MbStatus::NullPointer, format!("{what} is null"))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mb_status_message(status: MbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MbStatus::Ok => c"ok",
        MbStatus::NotCoprime => c"rank and degree are not coprime",
        MbStatus::InvalidArgument => c"invalid argument",
        MbStatus::WindowExhausted => c"truncation window exhausted",
        MbStatus::Math => c"arithmetic error",
        MbStatus::NullPointer => c"null pointer",
        MbStatus::Overflow => c"value does not fit in 64 bits",
        MbStatus::NotFound => c"no such entry",
        MbStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds the table for `N <= n_max` and `c_2 <= c2_max`. A `window` of zero
/// selects `n_max + 2 r^2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_new(
    r: u32,
    a: i64,
    n_max: u32,
    c2_max: i64,
    window: u32,
    out: *mut *mut MbBettiTable,
) -> MbStatus {
    if out.is_null() {
        set_error("out is null");
        return MbStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let mut built = None;
    let status = guard(std::panic::AssertUnwindSafe(|| {
        let w = if window == 0 {
            n_max.saturating_add(2 * r.saturating_mul(r))
        } else {
            window
        };
        built = Some(betti::betti_table(r, a, n_max, c2_max, w).map_err(lift)?);
        Ok(())
    }));
    if let Some(t) = built {
        *out = Box::into_raw(Box::new(MbBettiTable { inner: t }));
    }
    status
}

/// # Safety
/// `table` must be null or come from [`mb_betti_table_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_free(table: *mut MbBettiTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of `(c_2, N, b)` rows, or zero for a null table.
///
/// # Safety
/// `table` must be null or a live table.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_len(table: *const MbBettiTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.rows.len())
}

/// Row `index` in `(c_2, N)` order.
///
/// # Safety
/// `table` must be a live table and the out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_row(
    table: *const MbBettiTable,
    index: usize,
    c2: *mut i64,
    n: *mut u32,
    b: *mut i64,
) -> MbStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if c2.is_null() || n.is_null() || b.is_null() {
            return Err(null("out pointer"));
        }
        let row = t
            .inner
            .rows
            .get(index)
            .ok_or((MbStatus::NotFound, format!("row {index} out of range")))?;
        *c2 = row.c2;
        *n = row.n;
        *b = i64::try_from(&row.b).map_err(|_| (MbStatus::Overflow, format!("b = {}", row.b)))?;
        Ok(())
    })
}

/// `b_2N` at `c_2`.
///
/// # Safety
/// `table` must be a live table and `b` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_get(
    table: *const MbBettiTable,
    c2: i64,
    n: u32,
    b: *mut i64,
) -> MbStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if b.is_null() {
            return Err(null("b"));
        }
        let v = t.inner.get(c2, n).ok_or((
            MbStatus::NotFound,
            format!("no entry at c2 = {c2}, N = {n}"),
        ))?;
        *b = i64::try_from(v).map_err(|_| (MbStatus::Overflow, format!("b = {v}")))?;
        Ok(())
    })
}

/// Observed stabilization onset of `b_2N` within the table's horizon.
///
/// # Safety
/// `table` must be a live table and `c2` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_betti_table_onset(
    table: *const MbBettiTable,
    n: u32,
    c2: *mut i64,
) -> MbStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if c2.is_null() {
            return Err(null("c2"));
        }
        *c2 = *t
            .inner
            .onsets
            .get(&n)
            .ok_or((MbStatus::NotFound, format!("no onset for N = {n}")))?;
        Ok(())
    })
}

/// Writes the stable values `b_0, ..., b_{2 n_max}` into `out[0..=n_max]`.
///
/// # Safety
/// `out` must be valid for `len` writes, with `len > n_max`.
#[no_mangle]
pub unsafe extern "C" fn mb_stable_limit(n_max: u32, out: *mut u64, len: usize) -> MbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if len <= n_max as usize {
            return Err((
                MbStatus::InvalidArgument,
                format!("len {len} <= n_max {n_max}"),
            ));
        }
        for (i, v) in betti::stable_limit(n_max).iter().enumerate() {
            *out.add(i) = u64::try_from(v).map_err(|_| (MbStatus::Overflow, format!("b = {v}")))?;
        }
        Ok(())
    })
}

/// Generic and refined stabilization constants `C` for `M(r, aH, c_2)`.
///
/// # Safety
/// `c` and `c_refined` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_bound_c(r: u32, a: i64, c: *mut i64, c_refined: *mut i64) -> MbStatus {
    guard(|| {
        if c.is_null() || c_refined.is_null() {
            return Err(null("out pointer"));
        }
        betti::check_coprime(r, a).map_err(lift)?;
        let rep = bounds::bound_report(r, a).map_err(lift)?;
        *c = rep.c;
        *c_refined = rep.c_refined;
        Ok(())
    })
}

/// Refined `C_0` for the class `alpha E + beta F` as `num / den`.
///
/// # Safety
/// `num` and `den` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mb_refined_c0(
    r: u32,
    alpha: i64,
    beta: i64,
    num: *mut i64,
    den: *mut i64,
) -> MbStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null("out pointer"));
        }
        let v = bounds::refined_c0(r, alpha, beta).map_err(lift)?;
        *num = *v.numer();
        *den = *v.denom();
        Ok(())
    })
}
