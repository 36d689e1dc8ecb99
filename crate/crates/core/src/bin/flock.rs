fn main() {
    std::process::exit(flock_core::cli::cli_main(std::env::args_os()));
}
