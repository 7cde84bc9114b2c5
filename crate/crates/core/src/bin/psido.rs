fn main() {
    std::process::exit(psido::cli::run(std::env::args_os()));
}
