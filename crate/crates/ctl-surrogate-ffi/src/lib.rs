//! C ABI over the checker core: parse structures and formulas into opaque
//! handles, run exact checks, and render canonical/SMV text. All entry
//! points return an error code; the last error message is kept per thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use ctl_surrogate::{checker, ctl, kripke, CtlFormula, KripkeStructure};

/// Error codes shared with the generated header.
pub const CTLS_OK: c_int = 0;
pub const CTLS_ERR_NULL_ARGUMENT: c_int = 1;
pub const CTLS_ERR_INVALID_UTF8: c_int = 2;
pub const CTLS_ERR_PARSE: c_int = 3;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

/// Opaque Kripke structure handle.
pub struct CtlsKripke(KripkeStructure);

/// Opaque CTL formula handle.
pub struct CtlsFormula(CtlFormula);

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ctls_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, c_int> {
    if text.is_null() {
        set_error("null text argument".into());
        return Err(CTLS_ERR_NULL_ARGUMENT);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("text is not valid UTF-8".into());
        CTLS_ERR_INVALID_UTF8
    })
}

/// Parses the Kripke text format into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctls_kripke_parse(
    text: *const c_char,
    out: *mut *mut CtlsKripke,
) -> c_int {
    if out.is_null() {
        set_error("null output argument".into());
        return CTLS_ERR_NULL_ARGUMENT;
    }
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match kripke::parse(text) {
        Ok(k) => {
            *out = Box::into_raw(Box::new(CtlsKripke(k)));
            CTLS_OK
        }
        Err(e) => {
            set_error(e.to_string());
            CTLS_ERR_PARSE
        }
    }
}

/// Parses a CTL formula into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctls_formula_parse(
    text: *const c_char,
    out: *mut *mut CtlsFormula,
) -> c_int {
    if out.is_null() {
        set_error("null output argument".into());
        return CTLS_ERR_NULL_ARGUMENT;
    }
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match ctl::parse(text) {
        Ok(phi) => {
            *out = Box::into_raw(Box::new(CtlsFormula(phi)));
            CTLS_OK
        }
        Err(e) => {
            set_error(e.to_string());
            CTLS_ERR_PARSE
        }
    }
}

/// Runs the exact check. On success writes 1 (holds) or 0 into
/// `holds_out` and the labeling time in nanoseconds into `elapsed_ns_out`
/// (which may be null).
///
/// # Safety
/// Handles must come from the corresponding parse functions.
#[no_mangle]
pub unsafe extern "C" fn ctls_check(
    k: *const CtlsKripke,
    phi: *const CtlsFormula,
    holds_out: *mut c_int,
    elapsed_ns_out: *mut u64,
) -> c_int {
    if k.is_null() || phi.is_null() || holds_out.is_null() {
        set_error("null argument".into());
        return CTLS_ERR_NULL_ARGUMENT;
    }
    let result = checker::check(&(*k).0, &(*phi).0);
    *holds_out = result.holds as c_int;
    if !elapsed_ns_out.is_null() {
        *elapsed_ns_out = result.elapsed_ns;
    }
    CTLS_OK
}

unsafe fn to_owned_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Canonical text of a structure. Free with `ctls_string_free`.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctls_kripke_serialize(k: *const CtlsKripke) -> *mut c_char {
    if k.is_null() {
        return ptr::null_mut();
    }
    to_owned_c_string(kripke::serialize(&(*k).0))
}

/// Canonical fully parenthesized formula text. Free with
/// `ctls_string_free`.
///
/// # Safety
/// `phi` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctls_formula_format(phi: *const CtlsFormula) -> *mut c_char {
    if phi.is_null() {
        return ptr::null_mut();
    }
    to_owned_c_string(ctl::format(&(*phi).0))
}

/// SMV module text for the pair. Free with `ctls_string_free`.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn ctls_export_smv(
    k: *const CtlsKripke,
    phi: *const CtlsFormula,
) -> *mut c_char {
    if k.is_null() || phi.is_null() {
        return ptr::null_mut();
    }
    to_owned_c_string(kripke::export_smv(&(*k).0, &(*phi).0))
}

/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ctls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `k` must come from `ctls_kripke_parse` and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ctls_kripke_free(k: *mut CtlsKripke) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// `phi` must come from `ctls_formula_parse` and not have been freed
/// already.
#[no_mangle]
pub unsafe extern "C" fn ctls_formula_free(phi: *mut CtlsFormula) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const KRIPKE: &str = "states 2; init 0; props p q; trans 0->1 1->1; label 0: p; label 1: q;";

    fn parse_kripke(text: &str) -> *mut CtlsKripke {
        let c = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ctls_kripke_parse(c.as_ptr(), &mut out) }, CTLS_OK);
        out
    }

    fn parse_formula(text: &str) -> *mut CtlsFormula {
        let c = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ctls_formula_parse(c.as_ptr(), &mut out) }, CTLS_OK);
        out
    }

    #[test]
    fn check_through_ffi() {
        let k = parse_kripke(KRIPKE);
        let phi = parse_formula("A [ p U q ]");
        let mut holds = -1;
        let mut ns = 0u64;
        assert_eq!(unsafe { ctls_check(k, phi, &mut holds, &mut ns) }, CTLS_OK);
        assert_eq!(holds, 1);
        unsafe {
            ctls_formula_free(phi);
            ctls_kripke_free(k);
        }
    }

    #[test]
    fn parse_error_sets_message() {
        let c = CString::new("states x").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ctls_kripke_parse(c.as_ptr(), &mut out) }, CTLS_ERR_PARSE);
        let msg = unsafe { CStr::from_ptr(ctls_last_error()) };
        assert!(msg.to_str().unwrap().contains("syntax error"));
    }

    #[test]
    fn null_arguments_rejected() {
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { ctls_kripke_parse(ptr::null(), &mut out) },
            CTLS_ERR_NULL_ARGUMENT
        );
        let mut holds = 0;
        assert_eq!(
            unsafe { ctls_check(ptr::null(), ptr::null(), &mut holds, ptr::null_mut()) },
            CTLS_ERR_NULL_ARGUMENT
        );
    }

    #[test]
    fn strings_roundtrip() {
        let k = parse_kripke(KRIPKE);
        let phi = parse_formula("AG p");
        unsafe {
            let text = ctls_kripke_serialize(k);
            assert_eq!(CStr::from_ptr(text).to_str().unwrap(), KRIPKE);
            ctls_string_free(text);
            let smv = ctls_export_smv(k, phi);
            assert!(CStr::from_ptr(smv).to_str().unwrap().contains("CTLSPEC AG (p)"));
            ctls_string_free(smv);
            let f = ctls_formula_format(phi);
            assert_eq!(CStr::from_ptr(f).to_str().unwrap(), "(AG (p))");
            ctls_string_free(f);
            ctls_formula_free(phi);
            ctls_kripke_free(k);
        }
    }
}
