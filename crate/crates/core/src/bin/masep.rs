fn main() {
    std::process::exit(masep::cli::run(std::env::args_os()));
}
