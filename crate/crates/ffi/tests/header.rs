use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/vortex_gyro.h")).unwrap();
    for symbol in [
        "VG_STATUS_OK",
        "vg_last_error",
        "vg_profile_new",
        "vg_profile_free",
        "vg_transfer_run",
        "vg_trajectory_free",
        "vg_density_render",
        "vg_density_free",
        "vg_snapshot",
        "vg_image_free",
        "vg_extract_fringe_phase",
        "vg_estimate_rate",
        "vg_sensitivity",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/vortex_gyro.h");
    let Ok(output) = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
}
