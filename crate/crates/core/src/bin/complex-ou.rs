fn main() {
    std::process::exit(complex_ou::harness::cli::run());
}
