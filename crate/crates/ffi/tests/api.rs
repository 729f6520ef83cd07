use std::ffi::{c_char, CStr, CString};
use std::ptr;

use progeq_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    pq_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(pq_last_error()).to_str().unwrap().to_owned()
}

unsafe fn parse(text: &str) -> *mut PqProgram {
    let mut p = ptr::null_mut();
    assert_eq!(pq_program_parse(c(text).as_ptr(), &mut p), PqStatus::Ok);
    p
}

const A: &str = "s01 = ( *s s02 s03 ) ; s04 === ( +s s01 s05 ) ;";

#[test]
fn parse_print_round_trip() {
    unsafe {
        let p = parse(A);
        assert_eq!(pq_program_len(p), 2);
        let mut s = ptr::null_mut();
        assert_eq!(pq_program_print(p, &mut s), PqStatus::Ok);
        assert_eq!(take(s), A);
        pq_program_free(p);
    }
}

#[test]
fn parse_errors_set_the_last_error() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(pq_program_parse(c("s01 === ( +s s02").as_ptr(), &mut p), PqStatus::ParseError);
        assert!(p.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(pq_program_parse(ptr::null(), &mut p), PqStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(pq_program_parse(bad.as_ptr().cast(), &mut p), PqStatus::InvalidUtf8);
        let ok = parse(A);
        assert!(last_error().is_empty());
        pq_program_free(ok);
    }
}

#[test]
fn apply_enumerate_and_verify() {
    unsafe {
        let a = parse(A);
        let mut legal = ptr::null_mut();
        assert_eq!(pq_program_enumerate(a, &mut legal), PqStatus::Ok);
        let legal = take(legal);
        assert!(legal.lines().any(|l| l == "stm2 Inline s01"));

        let mut b = ptr::null_mut();
        assert_eq!(pq_program_apply(a, c("stm2 Inline s01").as_ptr(), &mut b), PqStatus::Ok);
        let mut b2 = ptr::null_mut();
        assert_eq!(pq_program_apply(b, c("stm1 DeleteStm").as_ptr(), &mut b2), PqStatus::Ok);
        let mut text = ptr::null_mut();
        pq_program_print(b2, &mut text);
        assert_eq!(take(text), "s04 === ( +s ( *s s02 s03 ) s05 ) ;");

        assert_eq!(pq_verify(a, b2, c("# inline then drop\nstm2 Inline s01\nstm1 DeleteStm\n").as_ptr()), PqStatus::Ok);
        assert_eq!(pq_verify(a, b2, c("stm2 Inline s01").as_ptr()), PqStatus::NotProven);
        assert!(last_error().contains("does not match"));
        assert_eq!(pq_verify(a, b2, c("stm2 Frobnicate").as_ptr()), PqStatus::RuleError);

        let mut none = ptr::null_mut();
        assert_eq!(pq_program_apply(a, c("stm1 DeleteStm").as_ptr(), &mut none), PqStatus::NotApplicable);
        assert!(none.is_null());
        for p in [a, b, b2] {
            pq_program_free(p);
        }
    }
}

#[test]
fn heuristic_prover_finds_short_proofs() {
    unsafe {
        let a = parse("s01 === ( +s s02 s03 ) ;");
        let b = parse("s01 === ( +s s03 s02 ) ;");
        let mut proof = ptr::null_mut();
        assert_eq!(pq_prove_heuristic(a, b, 3, 2, 5, &mut proof), PqStatus::Ok);
        let proof = take(proof);
        assert_eq!(proof, "stm1 Commute N");
        assert_eq!(pq_verify(a, b, c(&proof).as_ptr()), PqStatus::Ok);

        let v = parse("v01 === ( +v v02 v03 ) ;");
        let mut out = ptr::null_mut();
        assert_eq!(pq_prove_heuristic(a, v, 3, 2, 3, &mut out), PqStatus::NotProven);
        assert!(out.is_null());
        assert_eq!(pq_prove_heuristic(a, b, 0, 2, 3, &mut out), PqStatus::RuleError);
        for p in [a, b, v] {
            pq_program_free(p);
        }
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(pq_program_print(ptr::null(), &mut s), PqStatus::NullArgument);
        assert_eq!(pq_program_len(ptr::null()), 0);
        assert_eq!(pq_verify(ptr::null(), ptr::null(), c("").as_ptr()), PqStatus::NullArgument);
        pq_program_free(ptr::null_mut());
        pq_string_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(pq_version()).to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
