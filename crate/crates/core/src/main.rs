fn main() {
    std::process::exit(papertorus::cli::run(std::env::args_os()));
}
