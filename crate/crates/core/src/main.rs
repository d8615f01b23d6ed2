fn main() {
    std::process::exit(lemmanaid::cli::run(std::env::args_os()));
}
