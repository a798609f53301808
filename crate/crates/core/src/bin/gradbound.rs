fn main() {
    std::process::exit(gradbound::cli::run(std::env::args_os()));
}
