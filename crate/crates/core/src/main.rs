fn main() {
    std::process::exit(noma_aloha::cli::run());
}
