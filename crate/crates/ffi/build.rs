use std::env;
use std::path::Path;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let out_dir = Path::new(&crate_dir).join("include");
    std::fs::create_dir_all(&out_dir).expect("unable to create include directory");

    cbindgen::generate(&crate_dir)
        .expect("unable to generate bindings")
        .write_to_file(out_dir.join("chainskip.h"));

    println!("cargo:rerun-if-changed=cbindgen.toml");
    println!("cargo:rerun-if-changed=src/lib.rs");
}
