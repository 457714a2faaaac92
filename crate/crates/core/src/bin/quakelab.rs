fn main() {
    std::process::exit(quakelab::cli::main_with_args(std::env::args_os()));
}
