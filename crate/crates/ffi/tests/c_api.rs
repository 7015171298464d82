use std::ffi::{CStr, CString};
use std::ptr;

use altpaths_ffi::*;

const DIAMOND: &str = r#"{
    "nodes": [0, 1, 2, 3],
    "arcs": [
        {"id": 10, "tail": 0, "head": 1, "cap": 5, "cost": 1},
        {"id": 11, "tail": 1, "head": 3, "cap": 5, "cost": 1},
        {"id": 12, "tail": 0, "head": 2, "cap": 4, "cost": 2},
        {"id": 13, "tail": 2, "head": 3, "cap": 4, "cost": 2}
    ],
    "source": 0, "dest": 3, "k": 2
}"#;

fn last_error() -> String {
    let p = altpaths_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(json: &str) -> *mut AltpathsInstance {
    let text = CString::new(json).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { altpaths_instance_from_json(text.as_ptr(), &mut inst) },
        AltpathsStatus::Ok
    );
    inst
}

#[test]
fn solve_and_read_back() {
    let inst = load(DIAMOND);
    let mut sol = ptr::null_mut();
    let status = unsafe { altpaths_solve(inst, AltpathsMethod::Benders, ptr::null(), &mut sol) };
    assert_eq!(status, AltpathsStatus::Ok);
    unsafe {
        assert_eq!(altpaths_solution_status(sol), AltpathsSolveStatus::Optimal);
        let (mut z, mut cost) = (0, 0);
        assert_eq!(altpaths_solution_objective(sol, &mut z, &mut cost), AltpathsStatus::Ok);
        assert_eq!((z, cost), (4, 6));

        assert_eq!(altpaths_solution_path_count(sol), 2);
        let mut paths = Vec::new();
        for i in 0..2 {
            let (mut arcs, mut len) = (ptr::null(), 0);
            assert_eq!(altpaths_solution_path(sol, i, &mut arcs, &mut len), AltpathsStatus::Ok);
            paths.push(std::slice::from_raw_parts(arcs, len).to_vec());
        }
        paths.sort();
        assert_eq!(paths, vec![vec![10, 11], vec![12, 13]]);
        let (mut arcs, mut len) = (ptr::null(), 0);
        assert_eq!(
            altpaths_solution_path(sol, 2, &mut arcs, &mut len),
            AltpathsStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));

        let mut k = AltpathsKpis {
            cost: 0,
            min_surviving_paths: 0,
            min_max_flow: 0,
            path_disjointness: 0,
        };
        assert_eq!(altpaths_solution_kpis(sol, &mut k), AltpathsStatus::Ok);
        assert_eq!(
            (k.cost, k.min_surviving_paths, k.min_max_flow, k.path_disjointness),
            (6, 1, 4, 2)
        );

        let mut json = ptr::null_mut();
        assert_eq!(altpaths_solution_to_json(sol, &mut json), AltpathsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        altpaths_string_free(json);
        assert!(text.contains("\"status\": \"optimal\""), "{text}");

        altpaths_solution_free(sol);
        altpaths_instance_free(inst);
    }
}

#[test]
fn relaxation_and_options() {
    let inst = load(DIAMOND);
    let mut opts = altpaths_solve_options_default();
    assert!(opts.warm_start && opts.time_limit_s > 0.0);
    unsafe {
        assert_eq!(altpaths_instance_set_k(inst, 3), AltpathsStatus::Ok);
        assert_eq!(altpaths_instance_k(inst), 3);
        assert_eq!(altpaths_instance_set_k(inst, 0), AltpathsStatus::InvalidArgument);

        let mut sol = ptr::null_mut();
        assert_eq!(
            altpaths_solve(inst, AltpathsMethod::Rapcp, &opts, &mut sol),
            AltpathsStatus::Ok
        );
        assert_eq!(altpaths_solution_path_count(sol), 3);
        altpaths_solution_free(sol);

        opts.oracle_cap = 1;
        let mut sol = ptr::null_mut();
        assert_eq!(
            altpaths_solve(inst, AltpathsMethod::Oracle, &opts, &mut sol),
            AltpathsStatus::Refused
        );
        assert!(sol.is_null());
        assert!(last_error().contains("refuses"));

        opts.time_limit_s = -1.0;
        assert_eq!(
            altpaths_solve(inst, AltpathsMethod::Benders, &opts, &mut sol),
            AltpathsStatus::InvalidArgument
        );
        altpaths_instance_free(inst);
    }
}

#[test]
fn infeasible_has_no_objective() {
    let json = DIAMOND
        .replace("\"dest\": 3", "\"dest\": 0")
        .replace("\"source\": 0", "\"source\": 3");
    let inst = load(&json);
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(
            altpaths_solve(inst, AltpathsMethod::Rapcpa2, ptr::null(), &mut sol),
            AltpathsStatus::Ok
        );
        assert_eq!(altpaths_solution_status(sol), AltpathsSolveStatus::Infeasible);
        assert_eq!(altpaths_solution_path_count(sol), 0);
        let (mut z, mut cost) = (0, 0);
        assert_eq!(
            altpaths_solution_objective(sol, &mut z, &mut cost),
            AltpathsStatus::InvalidArgument
        );
        altpaths_solution_free(sol);
        altpaths_instance_free(inst);
    }
}

#[test]
fn bad_input_is_reported() {
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(
            altpaths_instance_from_json(ptr::null(), &mut inst),
            AltpathsStatus::NullPointer
        );
        let bad = CString::new(DIAMOND.replace("\"cap\": 4", "\"cap\": -4")).unwrap();
        assert_eq!(
            altpaths_instance_from_json(bad.as_ptr(), &mut inst),
            AltpathsStatus::ParseError
        );
        assert!(last_error().contains("capacity"), "{}", last_error());
        let garbled = CString::new("{\"nodes\": [0,").unwrap();
        assert_eq!(
            altpaths_instance_from_json(garbled.as_ptr(), &mut inst),
            AltpathsStatus::ParseError
        );
        let missing = CString::new("/nonexistent/instance.json").unwrap();
        assert_eq!(
            altpaths_instance_load(missing.as_ptr(), &mut inst),
            AltpathsStatus::IoError
        );
        assert!(inst.is_null());
        assert_eq!(altpaths_solution_path_count(ptr::null()), 0);
        altpaths_instance_free(ptr::null_mut());
        altpaths_solution_free(ptr::null_mut());
        altpaths_string_free(ptr::null_mut());
    }
}

/// The generated header must compile as C when a C compiler is available.
#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/altpaths.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ AltpathsSolveOptions o = altpaths_solve_options_default(); \
             return (int)o.oracle_cap + ALTPATHS_STATUS_OK; }}\n"
        ),
    )
    .unwrap();
    match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("skipping header check, no C compiler: {e}"),
    }
}
