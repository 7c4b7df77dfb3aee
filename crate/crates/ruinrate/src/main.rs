fn main() {
    std::process::exit(ruinrate::cli::run(std::env::args_os()));
}
