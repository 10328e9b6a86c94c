fn main() {
    std::process::exit(skyclear::cli::run(std::env::args_os()));
}
