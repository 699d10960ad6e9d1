fn main() {
    std::process::exit(airy_bounce::cli::main_with_args(std::env::args_os()));
}
