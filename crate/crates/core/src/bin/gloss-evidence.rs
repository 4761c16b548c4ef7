fn main() {
    std::process::exit(gloss_evidence::cli::main_with_args(std::env::args_os()));
}
