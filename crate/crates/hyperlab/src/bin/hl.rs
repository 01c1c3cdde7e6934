fn main() {
    std::process::exit(hyperlab::cli::run(std::env::args_os()));
}
