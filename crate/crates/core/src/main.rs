fn main() {
    std::process::exit(orthostab::cli::run(std::env::args_os()));
}
