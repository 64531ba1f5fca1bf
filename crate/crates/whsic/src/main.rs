fn main() {
    std::process::exit(whsic::cli::run());
}
