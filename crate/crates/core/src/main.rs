fn main() {
    std::process::exit(lobflux::cli::main_with_args(std::env::args_os()));
}
