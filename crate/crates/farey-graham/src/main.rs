fn main() {
    std::process::exit(farey_graham::cli::run(std::env::args_os()));
}
