//! Exercises the C ABI the way a foreign caller would: raw pointers,
//! status codes, and explicit frees.

use std::ffi::{CStr, CString};
use std::ptr;

use hjset_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    hjset_string_free(ptr);
    s
}

#[test]
fn version_is_a_static_string() {
    let v = hjset_version();
    assert!(!v.is_null());
    let text = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert_eq!(text, env!("CARGO_PKG_VERSION"));
}

#[test]
fn hj_number_resolves_the_classic_case() {
    let mut n: u32 = 0;
    assert_eq!(hjset_hj_number(2, 2, 4, &mut n), HjsetStatus::Ok);
    assert_eq!(n, 2);
    // unresolved within the cap is the Exhausted status, not an error
    assert_eq!(hjset_hj_number(3, 2, 3, &mut n), HjsetStatus::Exhausted);
    // and a null out-parameter is caught
    assert_eq!(
        hjset_hj_number(2, 2, 4, ptr::null_mut()),
        HjsetStatus::NullPointer
    );
}

#[test]
fn line_free_coloring_feeds_back_into_line_search() {
    let mut coloring: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(hjset_hj_line_free(3, 2, 3, &mut coloring), HjsetStatus::Ok);
    let text = unsafe { take_string(coloring) };
    assert!(text.lines().count() == 27);

    let colors = c(&text);
    let mut root: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { hjset_find_mono_line(3, 1, colors.as_ptr(), &mut root) };
    assert_eq!(status, HjsetStatus::Exhausted, "coloring must be line-free");

    // no line-free coloring of the 2x2 square exists
    let mut none: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(hjset_hj_line_free(2, 2, 2, &mut none), HjsetStatus::Exhausted);
}

#[test]
fn find_witness_returns_a_toml_tuple() {
    let pred = c("(length-mod 2 0)");
    let seqs = c("(word-power \"a\")");
    let mut witness: *mut std::ffi::c_char = ptr::null_mut();
    let status =
        unsafe { hjset_find_witness(2, pred.as_ptr(), seqs.as_ptr(), 2, 4, 2, &mut witness) };
    assert_eq!(status, HjsetStatus::Ok);
    let text = unsafe { take_string(witness) };
    assert_eq!(text, "m = 1\nt = [1]\na = [\"a\", \"aa\"]\n");

    let never = c("(false)");
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let status =
        unsafe { hjset_find_witness(2, never.as_ptr(), seqs.as_ptr(), 2, 4, 2, &mut out) };
    assert_eq!(status, HjsetStatus::Exhausted);
}

#[test]
fn theorem3_finds_the_even_length_word() {
    let pred = c("(length-mod 2 0)");
    let mut word: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { hjset_theorem3(pred.as_ptr(), 2, 2, 6, &mut word) };
    assert_eq!(status, HjsetStatus::Ok);
    assert_eq!(unsafe { take_string(word) }, "#1#2");
}

#[test]
fn bad_input_reports_through_last_error() {
    let broken = c("(not-a-form 1)");
    let seqs = c("(word-power \"a\")");
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let status =
        unsafe { hjset_find_witness(2, broken.as_ptr(), seqs.as_ptr(), 2, 4, 2, &mut out) };
    assert_eq!(status, HjsetStatus::InvalidInput);
    let msg = unsafe { take_string(hjset_last_error()) };
    assert!(msg.contains("line 1"), "got: {msg}");
}

#[test]
fn certificate_handles_roundtrip_and_verify() {
    // produce a small certificate through the library API
    let mut coloring: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(hjset_hj_line_free(2, 2, 1, &mut coloring), HjsetStatus::Ok);
    let coloring_text = unsafe { take_string(coloring) };
    assert_eq!(coloring_text, "a\t1\nb\t2\n");

    // hand-build a certificate via the core crate and push it through the ABI
    let cert = {
        use hjset::cert::{Certificate, CheckRow, ResultObject, WordColor};
        use std::collections::BTreeMap;
        let mut input = BTreeMap::new();
        input.insert("k".to_string(), "2".to_string());
        input.insert("nvars".to_string(), "0".to_string());
        input.insert("c".to_string(), "2".to_string());
        Certificate::new(
            "hj line-free",
            input,
            ResultObject::HjLineFree {
                found: true,
                coloring: vec![
                    WordColor {
                        word: "a".into(),
                        color: 1,
                    },
                    WordColor {
                        word: "b".into(),
                        color: 2,
                    },
                ],
                roots_total: 1,
                nodes_visited: 2,
            },
            vec![CheckRow {
                claim: "line-free".into(),
                ok: true,
            }],
            1,
            0,
        )
        .unwrap()
    };
    let toml_text = c(&cert.to_toml().unwrap());

    let mut handle: *mut HjsetCertificate = ptr::null_mut();
    assert_eq!(
        unsafe { hjset_certificate_parse(toml_text.as_ptr(), &mut handle) },
        HjsetStatus::Ok
    );
    let mut sub: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { hjset_certificate_subcommand(handle, &mut sub) },
        HjsetStatus::Ok
    );
    assert_eq!(unsafe { take_string(sub) }, "hj line-free");
    assert_eq!(
        unsafe { hjset_certificate_verify(handle) },
        HjsetStatus::Ok
    );
    let mut text_back: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { hjset_certificate_to_toml(handle, &mut text_back) },
        HjsetStatus::Ok
    );
    let round = unsafe { take_string(text_back) };
    assert!(round.contains("hj line-free"));
    unsafe { hjset_certificate_free(handle) };

    // tampered text parses but fails verification
    let tampered = cert.to_toml().unwrap().replace("color = 2", "color = 1");
    let tampered = c(&tampered);
    let mut bad: *mut HjsetCertificate = ptr::null_mut();
    assert_eq!(
        unsafe { hjset_certificate_parse(tampered.as_ptr(), &mut bad) },
        HjsetStatus::Ok
    );
    assert_eq!(
        unsafe { hjset_certificate_verify(bad) },
        HjsetStatus::VerifyFailed
    );
    unsafe { hjset_certificate_free(bad) };
}
