fn main() {
    std::process::exit(chfi::cli::run(std::env::args_os()));
}
