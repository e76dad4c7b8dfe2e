//! C ABI over the tower engine.
//!
//! Every entry point returns a [`CsaStatus`]. On failure the message is
//! available from [`csa_last_error`] until the next call on the same thread.
//! Strings returned through out-pointers are owned by the caller and must be
//! released with [`csa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use csa_tower::cli::Config;
use csa_tower::levels::Conjugacy;
use csa_tower::text::parse_word;
use csa_tower::tower::{Element, Tower, TowerSpec};
use csa_tower::GroupError;

/// Status codes. The first four match the CLI exit statuses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsaStatus {
    Ok = 0,
    /// A property check found a violation.
    Violation = 1,
    /// Bad input: syntax, unknown letter, stage violation, invalid spec.
    Usage = 2,
    /// The answer lies beyond the configured search bounds.
    Undecided = 3,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 4,
    /// The engine panicked; the handle should be discarded.
    Internal = 5,
}

/// Opaque tower handle.
pub struct CsaTower {
    tower: Tower,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(CsaStatus, String);

impl From<GroupError> for Fail {
    fn from(e: GroupError) -> Fail {
        let status = if e.is_undecided() {
            CsaStatus::Undecided
        } else {
            CsaStatus::Usage
        };
        Fail(status, e.to_string())
    }
}

fn invalid(what: &str) -> Fail {
    Fail(CsaStatus::InvalidArgument, what.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsaStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CsaStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{} is null", what)));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{} is not UTF-8", what)))
}

unsafe fn handle<'a>(t: *const CsaTower) -> Result<&'a Tower, Fail> {
    t.as_ref()
        .map(|h| &h.tower)
        .ok_or_else(|| invalid("tower handle is null"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Element at `stage`, or at the least stage containing its letters when
/// `stage` is 0.
unsafe fn element(t: &Tower, stage: u32, word: *const c_char) -> Result<Element, Fail> {
    let w = parse_word(text(word, "word")?)?;
    let stage = if stage == 0 { w.max_stage().max(1) } else { stage };
    Ok(t.element(stage, w)?)
}

/// Build a tower with default bounds. `variant` is `"cyclic-root"` or
/// `"rational-root"`.
///
/// # Safety
/// `variant` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_new(variant: *const c_char, base_rank: u32, out: *mut *mut CsaTower) -> CsaStatus {
    guard(|| {
        let variant = text(variant, "variant")?.parse()?;
        let tower = Tower::new(TowerSpec::new(variant, base_rank))?;
        put(out, Box::into_raw(Box::new(CsaTower { tower })))
    })
}

/// Build a tower from `key = value` configuration text.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_from_config(config: *const c_char, out: *mut *mut CsaTower) -> CsaStatus {
    guard(|| {
        let config = Config::parse(text(config, "config")?)?;
        let tower = Tower::new(config.spec)?;
        put(out, Box::into_raw(Box::new(CsaTower { tower })))
    })
}

/// # Safety
/// `tower` must come from a constructor here and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_free(tower: *mut CsaTower) {
    if !tower.is_null() {
        drop(Box::from_raw(tower));
    }
}

/// Reduced form of `word`. `stage` 0 picks the least stage containing it.
///
/// # Safety
/// `tower` must be a live handle, `word` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_normal_form(
    tower: *const CsaTower,
    stage: u32,
    word: *const c_char,
    out: *mut *mut c_char,
) -> CsaStatus {
    guard(|| {
        let t = handle(tower)?;
        let nf = t.normal_form(&element(t, stage, word)?)?;
        put(out, c_string(nf.to_string()))
    })
}

/// Decide `a = b`.
///
/// # Safety
/// `tower` must be a live handle, `a` and `b` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_equal(
    tower: *const CsaTower,
    stage: u32,
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> CsaStatus {
    guard(|| {
        let t = handle(tower)?;
        let (a, b) = (element(t, stage, a)?, element(t, stage, b)?);
        put(out, t.are_equal(&a, &b)?)
    })
}

/// Find `x` with `x^-1 g x = h` at the higher of the two stages. `*out` is
/// set to null when they are not conjugate.
///
/// # Safety
/// `tower` must be a live handle, `g` and `h` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_conjugate(
    tower: *const CsaTower,
    stage: u32,
    g: *const c_char,
    h: *const c_char,
    out: *mut *mut c_char,
) -> CsaStatus {
    guard(|| {
        let t = handle(tower)?;
        let (g, h) = (element(t, stage, g)?, element(t, stage, h)?);
        let k = g.stage.max(h.stage);
        match t.level(k)?.conjugate(&g.word, &h.word)? {
            Conjugacy::Conjugate(x) => put(out, c_string(x.to_string())),
            Conjugacy::NotConjugate => put(out, ptr::null_mut()),
            Conjugacy::Undecided(why) => Err(Fail(CsaStatus::Undecided, why)),
        }
    })
}

/// An `n`-th root of `word` in the union of the tower, verified before it is
/// returned. `out_stage` receives the stage the root lives in.
///
/// # Safety
/// `tower` must be a live handle, `word` NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_root(
    tower: *const CsaTower,
    word: *const c_char,
    n: u64,
    out: *mut *mut c_char,
    out_stage: *mut u32,
) -> CsaStatus {
    guard(|| {
        let t = handle(tower)?;
        let h = t.nth_root_union(&element(t, 0, word)?, n)?;
        if out.is_null() || out_stage.is_null() {
            return Err(invalid("output pointer is null"));
        }
        put(out_stage, h.stage)?;
        put(out, c_string(h.to_string()))
    })
}

/// Conjugacy class rep `index` of `stage`.
///
/// # Safety
/// `tower` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn csa_tower_class_rep(
    tower: *const CsaTower,
    stage: u32,
    index: usize,
    out: *mut *mut c_char,
) -> CsaStatus {
    guard(|| {
        let t = handle(tower)?;
        let reps = t.class_reps(stage, index + 1)?;
        put(out, c_string(reps[index].word.to_string()))
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call.
#[no_mangle]
pub extern "C" fn csa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn csa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
