use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(env::var("OUT_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("generate C bindings");

    bindings.write_to_file(out_dir.join("ncfourier.h"));
    // Checked-in copy for C consumers; only rewritten when it changes.
    std::fs::create_dir_all(crate_dir.join("include")).expect("create include directory");
    bindings.write_to_file(crate_dir.join("include").join("ncfourier.h"));
}
