//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "progeq.h"

int main(void) {
    PqProgram *a = NULL, *b = NULL;
    char *proof = NULL;
    if (pq_program_parse("s01 === ( +s s02 s03 ) ;", &a) != PQ_STATUS_OK) return 10;
    if (pq_program_parse("s01 === ( +s s03 s02 ) ;", &b) != PQ_STATUS_OK) return 11;
    if (pq_prove_heuristic(a, b, 2, 2, 4, &proof) != PQ_STATUS_OK) return 12;
    if (pq_verify(a, b, proof) != PQ_STATUS_OK) return 13;
    if (pq_program_parse("(", &a) != PQ_STATUS_PARSE_ERROR || strlen(pq_last_error()) == 0) return 14;
    printf("%s\n", proof);
    pq_string_free(proof);
    pq_program_free(a);
    pq_program_free(b);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(str::to_string)
}

fn static_library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libprogeq_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_links_and_runs() {
    let (Some(cc), Some(lib)) = (compiler(), static_library()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "stm1 Commute N");
}
