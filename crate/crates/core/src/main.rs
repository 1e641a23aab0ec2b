fn main() {
    std::process::exit(mestlab::cli::main_with_args(std::env::args_os()));
}
