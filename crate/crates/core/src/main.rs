fn main() {
    std::process::exit(nevlab_core::cli::run());
}
