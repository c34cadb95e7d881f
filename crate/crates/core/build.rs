fn main() {
    // Hermitian eigensolves go through the system LAPACK (see linalg::lapack).
    println!("cargo:rustc-link-lib=dylib=lapack");
}
