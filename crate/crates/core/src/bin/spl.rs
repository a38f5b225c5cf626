fn main() {
    std::process::exit(spectral_partitions::cli::run(std::env::args_os()));
}
