//! C ABI for the hjset search library.
//!
//! Conventions:
//! * every function returns an [`HjsetStatus`] code; `Ok` and `Exhausted`
//!   are the two non-error outcomes,
//! * strings returned through out-pointers are heap CStrings owned by the
//!   caller and released with [`hjset_string_free`],
//! * certificates are opaque handles released with
//!   [`hjset_certificate_free`],
//! * on any error status, [`hjset_last_error`] returns a message for the
//!   calling thread.
//!
//! All searches are deterministic and canonical-least, so repeated calls
//! with equal inputs return byte-identical strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hjset::cert::{self, Certificate};
use hjset::hj;
use hjset::jset::{self, Elem, JsetOutcome};
use hjset::lift::{self, Thm3Outcome};
use hjset::textio;
use hjset::words::Alphabet;
use hjset::Bounds;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjsetStatus {
    /// success; out-parameters are populated
    Ok = 0,
    /// the bounded search exhausted its space (a legitimate negative)
    Exhausted = 1,
    /// malformed input; see `hjset_last_error`
    InvalidInput = 2,
    /// a required pointer argument was null
    NullPointer = 3,
    /// an input string was not valid UTF-8
    Utf8 = 4,
    /// certificate verification failed
    VerifyFailed = 5,
    /// an internal panic was caught at the boundary
    Panic = 6,
}

/// Opaque certificate handle.
pub struct HjsetCertificate {
    inner: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

fn status_err(status: HjsetStatus, msg: impl Into<String>) -> HjsetStatus {
    set_error(msg);
    status
}

/// Message for the most recent error on this thread, or null. The caller
/// owns the string and must release it with `hjset_string_free`.
#[no_mangle]
pub extern "C" fn hjset_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn hjset_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library, or null.
#[no_mangle]
pub unsafe extern "C" fn hjset_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Release a certificate handle.
///
/// # Safety
/// `cert` must be a handle previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn hjset_certificate_free(cert: *mut HjsetCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, HjsetStatus> {
    if ptr.is_null() {
        return Err(status_err(HjsetStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| status_err(HjsetStatus::Utf8, "argument is not valid UTF-8"))
}

fn write_string(out: *mut *mut c_char, value: String) -> HjsetStatus {
    if out.is_null() {
        return status_err(HjsetStatus::NullPointer, "null out-parameter");
    }
    match CString::new(value.replace('\0', " ")) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            HjsetStatus::Ok
        }
        Err(_) => status_err(HjsetStatus::InvalidInput, "result contains a NUL byte"),
    }
}

fn guarded(f: impl FnOnce() -> HjsetStatus) -> HjsetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => status_err(HjsetStatus::Panic, "internal panic caught at the boundary"),
    }
}

/// Least `N <= max` such that every `c`-coloring of the length-`N` cube
/// over `k` letters has a monochromatic line. `Exhausted` means unresolved
/// within the cap.
#[no_mangle]
pub extern "C" fn hjset_hj_number(k: u32, c: u32, max: u32, out_number: *mut u32) -> HjsetStatus {
    guarded(|| {
        if out_number.is_null() {
            return status_err(HjsetStatus::NullPointer, "null out-parameter");
        }
        match hj::hj_number(k as usize, c, max as usize) {
            Ok(hj::HjNumberOutcome::Found { number, .. }) => {
                unsafe { *out_number = number as u32 };
                HjsetStatus::Ok
            }
            Ok(hj::HjNumberOutcome::Unresolved { .. }) => HjsetStatus::Exhausted,
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Lex-least line-free `c`-coloring of the length-`len` cube, rendered in
/// the `word<TAB>color` file format; `Exhausted` when every coloring has a
/// monochromatic line.
#[no_mangle]
pub extern "C" fn hjset_hj_line_free(
    k: u32,
    c: u32,
    len: u32,
    out_coloring: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        let alphabet = match Alphabet::new(k as usize, 0) {
            Ok(a) => a,
            Err(e) => return status_err(HjsetStatus::InvalidInput, e.to_string()),
        };
        match hj::search_line_free(k as usize, c, len as usize) {
            Ok(outcome) => match outcome.coloring {
                Some(coloring) => {
                    write_string(out_coloring, textio::render_coloring(&coloring, &alphabet))
                }
                None => HjsetStatus::Exhausted,
            },
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Canonically least monochromatic `n`-variable line of a coloring
/// (`word<TAB>color` text). On success the root is returned in word
/// syntax (`a#1b`).
///
/// # Safety
/// `colors` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hjset_find_mono_line(
    k: u32,
    n: u32,
    colors: *const c_char,
    out_root: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        let colors = match read_str(colors) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let run = || -> hjset::Result<Option<String>> {
            let alphabet = Alphabet::new(k as usize, n as usize)?;
            let coloring = textio::parse_coloring(colors, &alphabet)?;
            match hj::find_mono_line(&coloring, n as usize)? {
                hj::LineOutcome::Found { line, .. } => {
                    Ok(Some(alphabet.display_word(&line.root)))
                }
                hj::LineOutcome::None { .. } => Ok(None),
            }
        };
        match run() {
            Ok(Some(root)) => write_string(out_root, root),
            Ok(None) => HjsetStatus::Exhausted,
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Bounded J-set witness search over the word semigroup. On success the
/// witness is returned as a small TOML document with keys `m`, `t`, `a`.
///
/// # Safety
/// `pred` and `seqs` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn hjset_find_witness(
    k: u32,
    pred: *const c_char,
    seqs: *const c_char,
    m_max: u32,
    horizon: u32,
    pool_len: u32,
    out_witness: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        let (pred, seqs) = match (read_str(pred), read_str(seqs)) {
            (Ok(p), Ok(s)) => (p, s),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let run = || -> hjset::Result<(Alphabet, JsetOutcome)> {
            let alphabet = Alphabet::new(k as usize, 0)?;
            let pred = textio::parse_predicate(pred, Some(&alphabet))?;
            let seqs = textio::parse_sequences(seqs, Some(&alphabet))?;
            let bounds = Bounds {
                m_max: m_max as usize,
                t_horizon: horizon as usize,
                pool_len: pool_len as usize,
                ..Bounds::default()
            };
            let pool: Vec<Elem> = alphabet
                .s0_words_upto(bounds.pool_len)
                .into_iter()
                .map(Elem::Word)
                .collect();
            let outcome = jset::find_witness(&pred, &seqs, Some(&alphabet), &pool, &bounds)?;
            Ok((alphabet, outcome))
        };
        match run() {
            Ok((alphabet, JsetOutcome::Found(found))) => {
                let t: Vec<String> = found.witness.t.iter().map(|t| t.to_string()).collect();
                let a: Vec<String> = found
                    .witness
                    .a
                    .iter()
                    .map(|e| format!("\"{}\"", e.display(Some(&alphabet))))
                    .collect();
                write_string(
                    out_witness,
                    format!(
                        "m = {}\nt = [{}]\na = [{}]\n",
                        found.witness.m,
                        t.join(", "),
                        a.join(", ")
                    ),
                )
            }
            Ok((_, JsetOutcome::Exhausted { .. })) => HjsetStatus::Exhausted,
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Canonically least `n`-variable word whose every substitution instance
/// satisfies the predicate.
///
/// # Safety
/// `pred` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hjset_theorem3(
    pred: *const c_char,
    n: u32,
    k: u32,
    word_len: u32,
    out_word: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        let pred = match read_str(pred) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let run = || -> hjset::Result<(Alphabet, Thm3Outcome)> {
            let alphabet = Alphabet::new(k as usize, n as usize)?;
            let pred = textio::parse_predicate(pred, Some(&alphabet))?;
            let bounds = Bounds {
                word_len: word_len as usize,
                ..Bounds::default()
            };
            let outcome = lift::theorem3_find(&pred, n as usize, &alphabet, &bounds, false)?;
            Ok((alphabet, outcome))
        };
        match run() {
            Ok((alphabet, Thm3Outcome::Found(found))) => {
                write_string(out_word, alphabet.display_word(&found.word))
            }
            Ok((_, Thm3Outcome::Exhausted { .. })) => HjsetStatus::Exhausted,
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Parse a certificate from its TOML text into an opaque handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hjset_certificate_parse(
    text: *const c_char,
    out_cert: *mut *mut HjsetCertificate,
) -> HjsetStatus {
    guarded(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out_cert.is_null() {
            return status_err(HjsetStatus::NullPointer, "null out-parameter");
        }
        match Certificate::from_toml(text) {
            Ok(inner) => {
                *out_cert = Box::into_raw(Box::new(HjsetCertificate { inner }));
                HjsetStatus::Ok
            }
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Subcommand recorded in a certificate.
///
/// # Safety
/// `cert` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hjset_certificate_subcommand(
    cert: *const HjsetCertificate,
    out_subcommand: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        if cert.is_null() {
            return status_err(HjsetStatus::NullPointer, "null certificate handle");
        }
        let cert = &*cert;
        write_string(out_subcommand, cert.inner.meta.subcommand.clone())
    })
}

/// Serialize a certificate handle back to TOML.
///
/// # Safety
/// `cert` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hjset_certificate_to_toml(
    cert: *const HjsetCertificate,
    out_text: *mut *mut c_char,
) -> HjsetStatus {
    guarded(|| {
        if cert.is_null() {
            return status_err(HjsetStatus::NullPointer, "null certificate handle");
        }
        let cert = &*cert;
        match cert.inner.to_toml() {
            Ok(text) => write_string(out_text, text),
            Err(e) => status_err(HjsetStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Re-check every claim of a certificate without re-running its search.
///
/// # Safety
/// `cert` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hjset_certificate_verify(cert: *const HjsetCertificate) -> HjsetStatus {
    guarded(|| {
        if cert.is_null() {
            return status_err(HjsetStatus::NullPointer, "null certificate handle");
        }
        let cert = &*cert;
        match cert::verify(&cert.inner) {
            Ok(()) => HjsetStatus::Ok,
            Err(e) => status_err(HjsetStatus::VerifyFailed, e.to_string()),
        }
    })
}
