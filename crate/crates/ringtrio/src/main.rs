fn main() {
    std::process::exit(ringtrio::cli::run());
}
