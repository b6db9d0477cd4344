use std::ffi::{c_char, CStr, CString};
use std::ptr;

use grcob_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn owned(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    grcob_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(grcob_last_error()).to_str().unwrap().to_string()
}

const THETA: &str = r#"{"attach":[],"vertices":["u","v"],
  "half_edges":[{"id":"h0","at":"u"},{"id":"h1","at":"v"},{"id":"h2","at":"u"},
                {"id":"h3","at":"v"},{"id":"h4","at":"u"},{"id":"h5","at":"v"}],
  "edges":[["h0","h1"],["h2","h3"],["h4","h5"]]}"#;

const CIRCLE: &str = r#"{"vertices":["v"],"half_edges":[{"id":"a","at":"v"},{"id":"b","at":"v"}],"edges":[["a","b"]]}"#;

#[test]
fn gaf_round_trip_and_chi() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(grcob_gaf_from_json(cstr(THETA).as_ptr(), &mut g), GrcobStatus::Ok);
        let mut chi = 0;
        assert_eq!(grcob_gaf_chi(g, &mut chi), GrcobStatus::Ok);
        assert_eq!(chi, -1);
        let mut deg = 0;
        assert_eq!(grcob_xi_degree(g, 3, &mut deg), GrcobStatus::Ok);
        assert_eq!(deg, -3);
        let mut json = ptr::null_mut();
        assert_eq!(grcob_gaf_to_json(g, &mut json), GrcobStatus::Ok);
        let text = owned(json);
        let mut g2 = ptr::null_mut();
        assert_eq!(grcob_gaf_from_json(cstr(&text).as_ptr(), &mut g2), GrcobStatus::Ok);
        grcob_gaf_free(g);
        grcob_gaf_free(g2);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(grcob_gaf_from_json(cstr("{not json").as_ptr(), &mut g), GrcobStatus::MalformedJson);
        assert!(g.is_null());
        assert!(last_error().contains("malformed json"));
        let bad = r#"{"vertices":["v"],"half_edges":[{"id":"a","at":"w"}],"edges":[]}"#;
        assert_eq!(grcob_gaf_from_json(cstr(bad).as_ptr(), &mut g), GrcobStatus::InvalidGaf);
        assert_eq!(grcob_gaf_from_json(ptr::null(), &mut g), GrcobStatus::NullPointer);
        let mut n = 0usize;
        assert_eq!(grcob_spine_count(9, &mut n), GrcobStatus::RankUnsupported);
        let mut a = ptr::null_mut();
        assert_eq!(grcob_algebra_bundled(cstr("k3").as_ptr(), &mut a), GrcobStatus::InvalidAlgebra);
        let singular = r#"{"d":2,"basis":[{"name":"pt","deg":0},{"name":"M","deg":2}],"unit":"M",
            "product":{"M,M":[["M",1]],"M,pt":[["pt",1]],"pt,pt":[]},"counit":{"M":"1"}}"#;
        assert_eq!(grcob_algebra_from_json(cstr(singular).as_ptr(), &mut a), GrcobStatus::InvalidAlgebra);
    }
}

#[test]
fn circle_evaluates_to_euler_characteristic() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(grcob_gaf_from_json(cstr(CIRCLE).as_ptr(), &mut g), GrcobStatus::Ok);
        for (name, expected) in [("s2", "2"), ("t2", "0"), ("cp2", "3")] {
            let mut a = ptr::null_mut();
            assert_eq!(grcob_algebra_bundled(cstr(name).as_ptr(), &mut a), GrcobStatus::Ok);
            let mut m = ptr::null_mut();
            assert_eq!(grcob_evaluate(g, a, &mut m), GrcobStatus::Ok);
            let mut deg = 1;
            assert_eq!(grcob_map_degree(m, &mut deg), GrcobStatus::Ok);
            assert_eq!(deg, 0);
            let mut json = ptr::null_mut();
            assert_eq!(grcob_map_to_json(m, &mut json), GrcobStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(&owned(json)).unwrap();
            let entries = v["entries"].as_array().unwrap();
            if expected == "0" {
                assert!(entries.is_empty());
            } else {
                assert_eq!(entries[0]["coeff"], expected);
            }
            grcob_map_free(m);
            grcob_algebra_free(a);
        }
        grcob_gaf_free(g);
    }
}

#[test]
fn compose_and_sign() {
    unsafe {
        let g_json = r#"{"attach":[],"vertices":["u","v"],"half_edges":[{"id":"g0","at":"u"},{"id":"g1","at":"v"}],
            "edges":[["g0","g1"]],"marking":{"x":"u","y":"v"}}"#;
        let h_json = r#"{"attach":["x","y"],"vertices":[],"half_edges":[{"id":"k0","at":"x"},{"id":"k1","at":"y"},
            {"id":"k2","at":"x"},{"id":"k3","at":"y"}],"edges":[["k0","k1"],["k2","k3"]]}"#;
        let (mut g, mut h, mut k) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(grcob_gaf_from_json(cstr(g_json).as_ptr(), &mut g), GrcobStatus::Ok);
        assert_eq!(grcob_gaf_from_json(cstr(h_json).as_ptr(), &mut h), GrcobStatus::Ok);
        assert_eq!(grcob_compose(g, h, &mut k), GrcobStatus::Ok);
        let mut chi = 0;
        grcob_gaf_chi(k, &mut chi);
        assert_eq!(chi, -1);
        let mut sign = 0;
        assert_eq!(grcob_xi_compose_sign(g, h, 1, &mut sign), GrcobStatus::Ok);
        assert!(sign == 1 || sign == -1);
        let mut bad = ptr::null_mut();
        assert_eq!(grcob_compose(g, g, &mut bad), GrcobStatus::Mismatch);
        assert!(bad.is_null());
        for p in [g, h, k] {
            grcob_gaf_free(p);
        }
    }
}

#[test]
fn spine_through_the_boundary() {
    unsafe {
        let mut n = 0usize;
        assert_eq!(grcob_spine_count(2, &mut n), GrcobStatus::Ok);
        assert_eq!(n, 3);
        let mut json = ptr::null_mut();
        assert_eq!(grcob_spine_betti(2, 0, false, &mut json), GrcobStatus::Ok);
        assert_eq!(owned(json), "[1,0]");
    }
}

#[test]
fn null_out_pointers_are_rejected() {
    unsafe {
        assert_eq!(grcob_gaf_from_json(cstr(THETA).as_ptr(), ptr::null_mut()), GrcobStatus::NullPointer);
        assert_eq!(grcob_gaf_chi(ptr::null(), ptr::null_mut()), GrcobStatus::NullPointer);
        grcob_gaf_free(ptr::null_mut());
        grcob_string_free(ptr::null_mut());
    }
}
