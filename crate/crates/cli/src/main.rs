fn main() {
    std::process::exit(zariski_cli::run(std::env::args_os()));
}
