fn main() {
    std::process::exit(cubq::cli::run(std::env::args_os()));
}
