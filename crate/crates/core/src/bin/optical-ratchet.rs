fn main() {
    std::process::exit(optical_ratchet::cli::run(std::env::args_os()));
}
