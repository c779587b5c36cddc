fn main() {
    std::process::exit(spinrank::cli::run());
}
