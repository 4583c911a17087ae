fn main() { std::process::exit(fastgae::cli::run()); }
