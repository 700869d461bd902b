fn main() {
    std::process::exit(edgar_corpus::cli::run(std::env::args_os()));
}
