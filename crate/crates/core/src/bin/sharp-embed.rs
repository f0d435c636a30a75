fn main() {
    std::process::exit(sharp_embed::cli::run(std::env::args_os()));
}
