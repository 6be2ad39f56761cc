fn main() {
    std::process::exit(epistoch::cli::run(std::env::args_os()));
}
