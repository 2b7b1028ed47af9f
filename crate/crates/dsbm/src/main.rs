fn main() {
    std::process::exit(dsbm::cli::main_with_args(std::env::args_os()));
}
