fn main() {
    std::process::exit(sumset::cli::run(std::env::args_os()));
}
