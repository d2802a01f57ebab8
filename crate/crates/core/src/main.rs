fn main() {
    std::process::exit(ctrlchain::cli::run(std::env::args_os()));
}
