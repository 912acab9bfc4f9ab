fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(qfilm::cli::run_command(&argv));
}
