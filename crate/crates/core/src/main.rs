fn main() {
    std::process::exit(pseudomoment::cli::run_from_args(std::env::args_os()));
}
