fn main() {
    std::process::exit(lamtrans::cli::run(std::env::args_os()));
}
