fn main() {
    std::process::exit(pcadepth::cli::run(std::env::args_os()));
}
