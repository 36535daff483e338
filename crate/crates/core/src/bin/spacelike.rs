fn main() {
    std::process::exit(spacelike::cli::run(std::env::args_os()));
}
