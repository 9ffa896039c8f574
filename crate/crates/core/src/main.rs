fn main() {
    std::process::exit(genseries::cli::run(std::env::args_os()));
}
