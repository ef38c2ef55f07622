fn main() {
    std::process::exit(carleson_ns::cli::run_from(std::env::args_os()));
}
