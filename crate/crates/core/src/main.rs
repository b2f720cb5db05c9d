fn main() {
    std::process::exit(acsav::cli::main_with_args(std::env::args_os()));
}
