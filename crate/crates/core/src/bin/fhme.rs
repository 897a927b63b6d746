fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(filtered_hme::cli::main_with_args(&args));
}
