fn main() {
    std::process::exit(jobshop::cli::run(std::env::args_os()));
}
