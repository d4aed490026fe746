//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "holderforms.h"

int main(void) {
    HfGridField *f = NULL;
    if (hf_weierstrass_new(0.5, 2, 8, 1025, &f) != HF_STATUS_OK) return 1;
    HfGridField *g = NULL;
    if (hf_mollify(f, 0.05, &g) != HF_STATUS_OK) return 2;
    HfHolderEstimate h;
    if (hf_c_theta_norm(f, 0.5, &h) != HF_STATUS_OK || !(h.cnorm > 0)) return 3;
    hf_grid_field_free(g);
    hf_grid_field_free(f);
    if (hf_weierstrass_new(2.0, 2, 8, 1025, &f) != HF_STATUS_INVALID_ARGUMENT) return 4;
    if (hf_last_error_message() == NULL) return 5;
    HfPisot p;
    if (hf_pisot_example(&p) != HF_STATUS_OK || fabs(p.xi - 1.3247179572) > 1e-9) return 6;
    printf("ok %.10f\n", p.xi);
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libholderforms_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 1.3247179572"));
}
