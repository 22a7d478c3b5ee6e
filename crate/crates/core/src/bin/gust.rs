fn main() {
    std::process::exit(gust::cli::main_with_args(std::env::args_os()));
}
