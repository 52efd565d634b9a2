fn main() {
    std::process::exit(sturmkit::cli::run(std::env::args_os()));
}
