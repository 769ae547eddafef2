//! C ABI over the bloodflow solver.
//!
//! Every function returns a [`BfStatus`]. On failure the message of the last
//! error on the calling thread is available through [`bf_last_error`].
//! Handles are opaque; free them with [`bf_solver_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bloodflow::cases::{build_case, CaseName};
use bloodflow::{Error, FieldPair, Mode, SchemeConfig, Solver};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    State = 4,
    BlowUp = 5,
    Io = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfMode {
    WellBalanced = 0,
    NonWellBalanced = 1,
}

/// Opaque solver handle: a benchmark case set up on a grid, plus its current
/// state and time.
pub struct BfSolver {
    solver: Solver,
    state: FieldPair,
    time: f64,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> BfStatus {
    match err {
        Error::Usage(_) => BfStatus::InvalidArgument,
        Error::Config(_) => BfStatus::Config,
        Error::State { .. } => BfStatus::State,
        Error::BlowUp { .. } => BfStatus::BlowUp,
        Error::Io { .. } => BfStatus::Io,
        Error::Internal(_) => BfStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BfStatus, String)>) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside bloodflow");
            BfStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BfStatus, String) {
    (BfStatus::NullPointer, format!("{what} is null"))
}

/// Creates a solver for the named benchmark on `n_cells` cells at `t = 0`.
/// `cf` is the friction coefficient of the wave-damping case and ignored
/// otherwise.
///
/// # Safety
/// `case_name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_new(
    case_name: *const c_char,
    n_cells: usize,
    mode: BfMode,
    cf: f64,
    out: *mut *mut BfSolver,
) -> BfStatus {
    guard(|| {
        if case_name.is_null() {
            return Err(null("case_name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = CStr::from_ptr(case_name)
            .to_str()
            .map_err(|_| (BfStatus::InvalidArgument, "case_name is not UTF-8".to_string()))?;
        let case: CaseName = name.parse().map_err(lib_err)?;
        if n_cells < bloodflow::io::MIN_CELLS {
            return Err((
                BfStatus::InvalidArgument,
                format!("n_cells must be at least {}", bloodflow::io::MIN_CELLS),
            ));
        }
        let mode = match mode {
            BfMode::WellBalanced => Mode::WellBalanced,
            BfMode::NonWellBalanced => Mode::NonWellBalanced,
        };
        let spec = build_case(case, cf).map_err(lib_err)?;
        let (solver, state) = spec.setup(n_cells, &SchemeConfig::with_mode(mode)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BfSolver {
            solver,
            state,
            time: 0.0,
            steps: 0,
        }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from [`bf_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_free(handle: *mut BfSolver) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Advances the solution to `t_end` (no-op if already there). On error the
/// handle keeps the state from before the call.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_advance_to(handle: *mut BfSolver, t_end: f64) -> BfStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if !(t_end >= h.time) || !t_end.is_finite() {
            return Err((
                BfStatus::InvalidArgument,
                format!("t_end {t_end} must be finite and >= current time {}", h.time),
            ));
        }
        let out = h
            .solver
            .run_until(&h.state, h.time, t_end, &[], |_, _| Ok(()))
            .map_err(lib_err)?;
        h.state = out.state;
        h.time = out.t;
        h.steps += out.steps as u64;
        Ok(())
    })
}

/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_time(handle: *const BfSolver, out: *mut f64) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.time;
        Ok(())
    })
}

/// Number of time steps taken so far.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_steps(handle: *const BfSolver, out: *mut u64) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.steps;
        Ok(())
    })
}

/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_n_cells(handle: *const BfSolver, out: *mut usize) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.solver.grid.n_cells;
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize, what: &str) -> Result<(), (BfStatus, String)> {
    if dst.is_null() {
        return Err(null(what));
    }
    if len < src.len() {
        return Err((
            BfStatus::BufferTooSmall,
            format!("{what} holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies the interior areas and discharges into `a` and `q`, each of
/// length at least `n_cells`.
///
/// # Safety
/// `a` and `q` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_copy_state(handle: *const BfSolver, a: *mut f64, q: *mut f64, len: usize) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let g = &h.solver.grid;
        copy_out(h.state.interior_a(g), a, len, "a")?;
        copy_out(h.state.interior_q(g), q, len, "q")
    })
}

/// Copies the node coordinates.
///
/// # Safety
/// `x` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_copy_x(handle: *const BfSolver, x: *mut f64, len: usize) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        copy_out(&h.solver.grid.interior_coords(), x, len, "x")
    })
}

/// Copies the rest areas `A0` at the nodes.
///
/// # Safety
/// `a0` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bf_solver_copy_rest_area(handle: *const BfSolver, a0: *mut f64, len: usize) -> BfStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let g = &h.solver.grid;
        copy_out(&h.solver.geom.a0[g.interior()], a0, len, "a0")
    })
}

/// Writes the last error message of this thread, NUL-terminated and
/// truncated to fit, into `buf`. Returns the full message length without
/// the terminator.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn bf_last_error(buf: *mut c_char, len: usize) -> usize {
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

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn new(name: &str, n: usize) -> (BfStatus, *mut BfSolver) {
        let c = CString::new(name).unwrap();
        let mut h = ptr::null_mut();
        let s = unsafe { bf_solver_new(c.as_ptr(), n, BfMode::WellBalanced, 0.0, &mut h) };
        (s, h)
    }

    fn last_error() -> String {
        let mut buf = vec![0 as c_char; 256];
        unsafe { bf_last_error(buf.as_mut_ptr(), buf.len()) };
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn lifecycle() {
        let (s, h) = new("eternal_rest", 50);
        assert_eq!(s, BfStatus::Ok);
        assert!(!h.is_null());
        unsafe {
            let mut n = 0;
            assert_eq!(bf_solver_n_cells(h, &mut n), BfStatus::Ok);
            assert_eq!(n, 50);
            assert_eq!(bf_solver_advance_to(h, 1e-3), BfStatus::Ok);
            let mut t = 0.0;
            bf_solver_time(h, &mut t);
            assert_eq!(t, 1e-3);
            let mut steps = 0;
            bf_solver_steps(h, &mut steps);
            assert!(steps > 0);
            let (mut a, mut q, mut a0, mut x) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            assert_eq!(bf_solver_copy_state(h, a.as_mut_ptr(), q.as_mut_ptr(), n), BfStatus::Ok);
            assert_eq!(bf_solver_copy_rest_area(h, a0.as_mut_ptr(), n), BfStatus::Ok);
            assert_eq!(bf_solver_copy_x(h, x.as_mut_ptr(), n), BfStatus::Ok);
            for i in 0..n {
                assert!((a[i] - a0[i]).abs() <= 1e-18);
                assert!(q[i].abs() <= 1e-18);
            }
            assert!(x.windows(2).all(|w| w[1] > w[0]));
            bf_solver_free(h);
        }
    }

    #[test]
    fn error_codes() {
        let (s, h) = new("nope", 50);
        assert_eq!(s, BfStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("unknown case"));
        assert_eq!(new("wave", 3).0, BfStatus::InvalidArgument);

        let mut h = ptr::null_mut();
        let s = unsafe { bf_solver_new(ptr::null(), 50, BfMode::WellBalanced, 0.0, &mut h) };
        assert_eq!(s, BfStatus::NullPointer);
        let c = CString::new("wave_damping").unwrap();
        let s = unsafe { bf_solver_new(c.as_ptr(), 50, BfMode::WellBalanced, -1.0, &mut h) };
        assert_eq!(s, BfStatus::Config);

        let (_, h) = new("wave", 40);
        unsafe {
            assert_eq!(bf_solver_advance_to(h, 1e-4), BfStatus::Ok);
            assert_eq!(bf_solver_advance_to(h, 0.0), BfStatus::InvalidArgument);
            let mut a = vec![0.0; 10];
            let mut q = vec![0.0; 10];
            assert_eq!(bf_solver_copy_state(h, a.as_mut_ptr(), q.as_mut_ptr(), 10), BfStatus::BufferTooSmall);
            assert!(last_error().contains("40"));
            assert_eq!(bf_solver_copy_state(h, ptr::null_mut(), q.as_mut_ptr(), 40), BfStatus::NullPointer);
            assert_eq!(bf_solver_advance_to(ptr::null_mut(), 1.0), BfStatus::NullPointer);
            bf_solver_free(h);
            bf_solver_free(ptr::null_mut());
        }
    }

    #[test]
    fn error_message_truncation() {
        new("nope", 50);
        let full = unsafe { bf_last_error(ptr::null_mut(), 0) };
        let mut buf = [1 as c_char; 8];
        let n = unsafe { bf_last_error(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(n, full);
        assert_eq!(buf[7], 0);
    }

    #[test]
    fn version_string() {
        let v = unsafe { CStr::from_ptr(bf_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
