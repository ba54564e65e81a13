fn main() {
    std::process::exit(hidden_driver::cli::main_with_args(std::env::args_os()));
}
