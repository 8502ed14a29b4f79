//! Compiles and runs a small C program against the static library and the
//! generated header. Skips when no C compiler is available.

use std::path::PathBuf;
use std::process::Command;

const DEMO: &str = r#"
#include <stdio.h>
#include "equimesh.h"

int main(void) {
    EqmProblem *problem = NULL;
    if (eqm_problem_babuska_rheinboldt(2.0, 1.0, -1.0, 0.01, &problem) != EQM_STATUS_OK) {
        fprintf(stderr, "problem: %s\n", eqm_last_error_message());
        return 1;
    }
    EqmResult *result = NULL;
    if (eqm_solve_adaptive(problem, 81, NULL, &result) != EQM_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", eqm_last_error_message());
        return 1;
    }
    if (eqm_result_converged_by(result) != EQM_CONVERGED_BY_QUALITY) return 2;
    double h1 = 0.0, eta = 0.0;
    if (eqm_result_h1_error(result, &h1) != EQM_STATUS_OK) return 3;
    if (eqm_result_eta_tilde(result, &eta) != EQM_STATUS_OK) return 3;
    /* published row: h1 = 5.73e1 within 10%, and h1 <= eta */
    if (h1 < 51.6 || h1 > 63.0) return 4;
    if (h1 > eta) return 5;
    printf("h1=%.6e eta=%.6e iters=%zu\n", h1, eta, eqm_result_iterations(result));
    eqm_result_free(result);
    eqm_problem_free(problem);
    return 0;
}
"#;

fn target_profile_dir() -> PathBuf {
    // target/<profile>/deps/<test-bin> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

/// `cargo test` alone does not emit the staticlib artifact, so build it.
fn build_staticlib(lib_dir: &std::path::Path) -> bool {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let profile_flag = lib_dir.file_name().map(|n| n == "release").unwrap_or(false);
    let mut cmd = Command::new(cargo);
    cmd.args(["build", "-p", "equimesh-ffi", "--lib"]);
    if profile_flag {
        cmd.arg("--release");
    }
    cmd.status().map(|s| s.success()).unwrap_or(false)
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    let lib_dir = target_profile_dir();
    let staticlib = lib_dir.join("libequimesh_ffi.a");
    assert!(
        build_staticlib(&lib_dir),
        "cargo build for the staticlib failed"
    );
    assert!(
        staticlib.exists(),
        "static library missing at {staticlib:?}"
    );

    let tmp = tempfile::tempdir().unwrap();
    let source = tmp.path().join("demo.c");
    let binary = tmp.path().join("demo");
    std::fs::write(&source, DEMO).unwrap();

    let compile = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(&include_dir)
        .arg(&source)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .output();
    let compile = match compile {
        Ok(out) => out,
        Err(_) => {
            eprintln!("no C compiler available, link test skipped");
            return;
        }
    };
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().unwrap();
    assert!(
        run.status.success(),
        "demo exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.starts_with("h1="), "unexpected output: {stdout}");
}
