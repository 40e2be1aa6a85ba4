fn main() {
    std::process::exit(qst::cli::run());
}
