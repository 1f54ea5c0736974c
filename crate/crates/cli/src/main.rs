fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(hermite_cli::run(&args));
}
