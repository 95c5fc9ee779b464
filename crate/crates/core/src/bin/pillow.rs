fn main() {
    std::process::exit(pillow_core::cli::run(std::env::args_os()));
}
