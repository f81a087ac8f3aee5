fn main() {
    std::process::exit(fogplace::cli::run(std::env::args_os()));
}
