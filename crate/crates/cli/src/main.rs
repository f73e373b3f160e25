fn main() {
    std::process::exit(qfnet_pipeline::cli::main_with_args(std::env::args_os()));
}
