fn main() {
    std::process::exit(idpos::cli::run(std::env::args_os()));
}
