//! Compile and run an actual C program against the generated header and the
//! static library, proving the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const C_SOURCE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "mdirac.h"

int main(void) {
    if (strlen(mdirac_version()) == 0) return 10;

    MdiracNk *jordan = NULL;
    if (mdirac_nk_example2(0.0, 0.0, 1.0, 0.0, 1e-10, &jordan) != MDIRAC_STATUS_OK) return 11;

    char *validation = NULL;
    if (mdirac_nk_validate(jordan, 1e-10, &validation) != MDIRAC_STATUS_OK) return 12;
    if (strstr(validation, "\"consistent\": true") == NULL) return 13;
    if (strstr(validation, "\"two_level\": false") == NULL) return 14;
    mdirac_string_free(validation);

    /* The Jordan pair is not in the canonical class. */
    char *canon = NULL;
    if (mdirac_nk_classify(jordan, 1e-10, &canon) != MDIRAC_STATUS_CONSTRAINT_VIOLATION) return 15;
    if (strlen(mdirac_last_error()) == 0) return 16;

    MdiracNk *standard = NULL;
    if (mdirac_nk_standard(1, 1e-10, &standard) != MDIRAC_STATUS_OK) return 17;
    double p[4] = {1.0, 0.0, 0.0, 0.0};
    char *wave = NULL;
    if (mdirac_plane_wave(standard, p, 1.0, 1e-10, &wave) != MDIRAC_STATUS_OK) return 18;
    if (strstr(wave, "\"dimension\": 2") == NULL) return 19;
    mdirac_string_free(wave);

    mdirac_nk_free(jordan);
    mdirac_nk_free(standard);
    return 0;
}
"#;

fn workspace_target_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("CARGO_TARGET_DIR") {
        return PathBuf::from(dir);
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    manifest.join("../../target")
}

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));

    // Make sure the staticlib artifact exists; plain `cargo test` only
    // produces the rlib.
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let build = Command::new(&cargo)
        .args(["build", "-p", "mdirac-ffi"])
        .current_dir(&manifest)
        .status()
        .expect("nested cargo build runs");
    assert!(build.success(), "building the staticlib failed");

    let staticlib = workspace_target_dir().join("debug/libmdirac_ffi.a");
    assert!(
        staticlib.exists(),
        "staticlib missing at {}",
        staticlib.display()
    );

    let work = std::env::temp_dir().join(format!("mdirac-cabi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("smoke.c");
    std::fs::write(&src, C_SOURCE).unwrap();
    let exe = work.join("smoke");

    let compile = Command::new("cc")
        .arg(&src)
        .arg(&staticlib)
        .arg("-I")
        .arg(manifest.join("include"))
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "C compilation failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("smoke test runs");
    assert_eq!(
        run.status.code(),
        Some(0),
        "C smoke test failed with {:?}",
        run.status.code()
    );

    std::fs::remove_dir_all(&work).ok();
}
