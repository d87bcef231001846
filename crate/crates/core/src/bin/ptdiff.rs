fn main() {
    std::process::exit(ptdiff::runner::cli::main_with_args(std::env::args_os()));
}
