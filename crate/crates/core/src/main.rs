fn main() {
    std::process::exit(polarcc::cli::run(std::env::args_os()));
}
