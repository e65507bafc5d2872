fn main() {
    std::process::exit(hestego::cli::run(std::env::args_os()));
}
