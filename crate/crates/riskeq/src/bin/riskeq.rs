fn main() {
    std::process::exit(riskeq::cli::run(std::env::args()));
}
