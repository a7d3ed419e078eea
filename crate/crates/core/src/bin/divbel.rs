fn main() {
    std::process::exit(diverse_beliefs::cli::run(std::env::args_os()));
}
