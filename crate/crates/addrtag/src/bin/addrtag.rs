fn main() {
    std::process::exit(addrtag::cli::run());
}
