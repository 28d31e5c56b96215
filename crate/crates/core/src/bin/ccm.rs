fn main() {
    std::process::exit(ccm_core::cli::main());
}
