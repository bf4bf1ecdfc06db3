use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cimqubo_ffi::*;

const THREE_ITEMS: &str = "three\n3\n5 3 4\n2 0\n1\n9\n4 7 2\n";

fn parse(text: &str) -> *mut CqInstance {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { cq_instance_parse(c.as_ptr(), CqFormat::Text, &mut inst) },
        CqStatus::Ok
    );
    inst
}

fn last_error() -> String {
    let p = cq_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn oracle_and_energies_through_handles() {
    let inst = parse(THREE_ITEMS);
    unsafe {
        assert_eq!(cq_instance_n(inst), 3);
        assert_eq!(cq_instance_capacity(inst), 9);
        let mut best = 0i64;
        let mut config = [9u8; 3];
        let mut count = 0u64;
        assert_eq!(
            cq_oracle(inst, &mut best, config.as_mut_ptr(), &mut count),
            CqStatus::Ok
        );
        assert_eq!((best, config, count), (9, [1, 0, 1], 6));

        let mut ineq = ptr::null_mut();
        assert_eq!(cq_inequality_build(inst, &mut ineq), CqStatus::Ok);
        let mut e = 0i64;
        assert_eq!(
            cq_inequality_energy(ineq, [1u8, 0, 1].as_ptr(), 3, &mut e),
            CqStatus::Ok
        );
        assert_eq!(e, -9);
        assert_eq!(
            cq_inequality_energy(ineq, [1u8, 1, 1].as_ptr(), 3, &mut e),
            CqStatus::Ok
        );
        assert_eq!(e, 0);
        assert_eq!(
            cq_inequality_energy(ineq, [1u8].as_ptr(), 1, &mut e),
            CqStatus::Dimension
        );
        assert!(last_error().contains("dimension"));
        cq_inequality_free(ineq);

        let mut dq = ptr::null_mut();
        assert_eq!(cq_dqubo_build(inst, 2, 2, &mut dq), CqStatus::Ok);
        assert_eq!(cq_dqubo_dim(dq), 12);
        let mut z = [0u8; 12];
        z[0] = 1;
        z[2] = 1;
        z[3 + 5] = 1; // y_6, matching weight 6
        assert_eq!(cq_dqubo_energy(dq, z.as_ptr(), 12, &mut e), CqStatus::Ok);
        assert_eq!(e, -9);
        cq_dqubo_free(dq);
        cq_instance_free(inst);
    }
}

#[test]
fn filter_and_anneal() {
    let inst = parse(THREE_ITEMS);
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(cq_filter_build(inst, 16, 4, 2.0, 0.0, &mut f), CqStatus::Ok);
        let mut d = CqFilterDecision::default();
        assert_eq!(cq_filter_check(f, [1u8, 1, 0].as_ptr(), 3, 0, &mut d), CqStatus::Ok);
        assert!(!d.feasible);
        assert!(d.working_ml < d.replica_ml);
        assert_eq!(cq_filter_check(f, [0u8, 1, 1].as_ptr(), 3, 0, &mut d), CqStatus::Ok);
        assert!(d.feasible);
        cq_filter_free(f);

        for (mode, cim) in [
            (CqMode::Inequality, false),
            (CqMode::Inequality, true),
            (CqMode::Dqubo, false),
        ] {
            let mut s = CqRunSummary::default();
            let mut cfg = [0u8; 12];
            assert_eq!(
                cq_anneal(inst, mode, 1000, 4, cim, &mut s, cfg.as_mut_ptr()),
                CqStatus::Ok
            );
            if mode == CqMode::Inequality {
                assert_eq!(s.best_qkp_value, 9);
                // 101 and 011 both reach 9.
                assert!(cfg[..3] == [1, 0, 1] || cfg[..3] == [0, 1, 1], "{cfg:?}");
            }
        }
        let mut a = CqRunSummary::default();
        let mut b = CqRunSummary::default();
        cq_anneal(inst, CqMode::Inequality, 300, 11, false, &mut a, ptr::null_mut());
        cq_anneal(inst, CqMode::Inequality, 300, 11, true, &mut b, ptr::null_mut());
        assert_eq!(a, b);
        cq_instance_free(inst);
    }
}

#[test]
fn generate_serialize_overhead() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(cq_instance_generate(100, 0.5, 64, 100, 0.5, 1, &mut inst), CqStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(cq_instance_serialize(inst, CqFormat::Json, &mut text), CqStatus::Ok);
        let json = CStr::from_ptr(text).to_str().unwrap().to_owned();
        cq_string_free(text);
        let c = CString::new(json).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(cq_instance_parse(c.as_ptr(), CqFormat::Json, &mut back), CqStatus::Ok);
        assert_eq!(cq_instance_capacity(back), cq_instance_capacity(inst));

        let mut o = CqOverhead::default();
        assert_eq!(cq_overhead(inst, 16, 2, 2, &mut o), CqStatus::Ok);
        assert!(o.dqubo_available);
        assert_eq!(o.dqubo_dim, 100 + o.capacity as usize);
        assert!(o.saving_fraction > 0.99);
        cq_instance_free(back);
        cq_instance_free(inst);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(
            cq_instance_parse(ptr::null(), CqFormat::Text, &mut inst),
            CqStatus::NullPointer
        );
        let bad = CString::new("x\n3\n1 2\n").unwrap();
        assert_eq!(
            cq_instance_parse(bad.as_ptr(), CqFormat::Text, &mut inst),
            CqStatus::Parse
        );
        assert!(last_error().contains("parse error"));
        assert_eq!(
            cq_instance_generate(0, 0.5, 10, 10, 0.5, 1, &mut inst),
            CqStatus::Validation
        );
        let mut e = 0;
        assert_eq!(
            cq_oracle(ptr::null(), &mut e, ptr::null_mut(), ptr::null_mut()),
            CqStatus::NullPointer
        );
        let big = parse("w\n1\n1\n100\n200\n");
        let mut f = ptr::null_mut();
        assert_eq!(cq_filter_build(big, 16, 4, 2.0, 0.0, &mut f), CqStatus::Capacity);
        cq_instance_free(big);
        assert_eq!(cq_instance_n(ptr::null()), 0);
        cq_instance_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cimqubo.h")).unwrap();
    for name in [
        "CQ_STATUS_OK",
        "typedef struct CqInstance CqInstance;",
        "cq_instance_parse",
        "cq_oracle",
        "cq_filter_check",
        "cq_anneal",
        "cq_overhead",
        "cq_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libcimqubo_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_header() {
    let (Some(lib), Ok(_)) = (static_lib(), Command::new("cc").arg("--version").output()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let tmp = std::env::temp_dir().join(format!("cimqubo_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "cimqubo.h"
int main(void) {
    CqInstance *inst = NULL;
    if (cq_instance_parse("t\n3\n5 3 4\n2 0\n1\n9\n4 7 2\n", CQ_FORMAT_TEXT, &inst) != CQ_STATUS_OK) return 1;
    int64_t best = 0;
    uint8_t cfg[3];
    if (cq_oracle(inst, &best, cfg, NULL) != CQ_STATUS_OK) return 2;
    printf("%lld %d%d%d\n", (long long)best, cfg[0], cfg[1], cfg[2]);
    cq_instance_free(inst);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "9 101\n");
    let _ = std::fs::remove_dir_all(&tmp);
}
