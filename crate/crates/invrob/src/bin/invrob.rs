fn main() {
    std::process::exit(invrob::cli::run())
}
